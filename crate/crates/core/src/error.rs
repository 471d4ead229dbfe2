use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("segment [{a}, {b}] is empty or not finite")]
    InvalidSegment { a: f64, b: f64 },

    #[error("a configuration needs at least one server")]
    NoServers,

    #[error("server position {position} is not a number")]
    NotANumber { position: f64 },

    #[error("server {index} at {position} lies outside [{a}, {b}]")]
    OutOfSegment {
        index: usize,
        position: f64,
        a: f64,
        b: f64,
    },

    #[error("{count} servers share coordinate {position}; at most two may be paired")]
    TripleOverlap { position: f64, count: usize },

    #[error("probability {value} outside {range}")]
    InvalidProbability { value: f64, range: &'static str },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("no equilibrium exists for n = {n}")]
    NoEquilibrium { n: usize },

    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),

    #[error("cut at f = {f} coincides with a server coordinate")]
    CutOnServer { f: f64 },

    #[error("{n} servers exceed the enumeration bound of {max}")]
    TooManyServers { n: usize, max: usize },

    #[error("the line-failure game is defined on [0, 1], got [{a}, {b}]")]
    UnitSegmentRequired { a: f64, b: f64 },

    #[error("player index {player} out of range for {n} servers")]
    NoSuchPlayer { player: usize, n: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
