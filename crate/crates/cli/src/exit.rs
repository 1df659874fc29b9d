//! Exit codes and the mapping from library errors onto them.

use cat0lab::boundary::BoundaryError;
use cat0lab::geodesy::GeodesyError;
use cat0lab::link::LinkError;
use cat0lab::pingpong::PingPongError;
use cat0lab::ComplexError;

pub const OK: u8 = 0;
/// A check ran to completion and came out negative.
pub const CHECK_FAILED: u8 = 1;
pub const INPUT: u8 = 2;
/// Search budget or window size ran out before an answer.
pub const LIMIT: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure {
            code: INPUT,
            message: message.into(),
        }
    }

    fn tagged(code: u8, module: &str, e: impl std::fmt::Display) -> Self {
        Failure {
            code,
            message: format!("{module}: {e}"),
        }
    }
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::input(s)
    }
}

impl From<ComplexError> for Failure {
    fn from(e: ComplexError) -> Self {
        Failure::tagged(INPUT, "complex", e)
    }
}

impl From<LinkError> for Failure {
    fn from(e: LinkError) -> Self {
        let code = match e {
            LinkError::ExplosionGuard { .. } => LIMIT,
            LinkError::NotCat0(_) => INPUT,
        };
        Failure::tagged(code, "link", e)
    }
}

pub fn geodesy_code(e: &GeodesyError) -> u8 {
    match e {
        GeodesyError::BudgetExhausted { .. } | GeodesyError::WindowExit { .. } => LIMIT,
        _ => INPUT,
    }
}

impl From<GeodesyError> for Failure {
    fn from(e: GeodesyError) -> Self {
        Failure::tagged(geodesy_code(&e), "geodesy", e)
    }
}

impl From<BoundaryError> for Failure {
    fn from(e: BoundaryError) -> Self {
        let code = match &e {
            BoundaryError::Geodesy(g) => geodesy_code(g),
            BoundaryError::BoundaryVertexFlag { .. } => LIMIT,
            _ => INPUT,
        };
        Failure::tagged(code, "boundary", e)
    }
}

impl From<PingPongError> for Failure {
    fn from(e: PingPongError) -> Self {
        let code = match &e {
            PingPongError::Geodesy(g) => geodesy_code(g),
            PingPongError::WindowTooShort { .. } => LIMIT,
            _ => INPUT,
        };
        Failure::tagged(code, "pingpong", e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cat0lab::Angle;

    #[test]
    fn codes() {
        let budget = GeodesyError::BudgetExhausted { upper: 1.0 };
        assert_eq!(Failure::from(budget.clone()).code, LIMIT);
        assert_eq!(Failure::from(BoundaryError::Geodesy(budget.clone())).code, LIMIT);
        assert_eq!(Failure::from(PingPongError::Geodesy(budget)).code, LIMIT);
        assert_eq!(Failure::from(GeodesyError::InvalidDirection).code, INPUT);
        assert_eq!(
            Failure::from(BoundaryError::HypothesisViolated { value: 4.0 }).code,
            INPUT
        );
        let flag = BoundaryError::BoundaryVertexFlag {
            vertex: "x".into(),
            value: Angle::zero(),
        };
        assert_eq!(Failure::from(flag).code, LIMIT);
        assert_eq!(
            Failure::from(PingPongError::WindowTooShort { t: 1.0, half: 0.5 }).code,
            LIMIT
        );
        assert_eq!(Failure::from(LinkError::NotCat0("o".into())).code, INPUT);
        assert_eq!(Failure::from(ComplexError::Parse("x".into())).code, INPUT);
        assert!(Failure::from(LinkError::NotCat0("o".into()))
            .message
            .starts_with("link: "));
    }
}
