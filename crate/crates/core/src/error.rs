use alloc::string::String;

use thiserror::Error;

use crate::f2::F2Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Linear(#[from] F2Error),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("profile relations do not form a Hopf ideal: diagonal of {relation} escapes the ideal")]
    NotHopfIdeal { relation: String },
    #[error("profile {sub} is not contained in profile {amb}")]
    NotSubProfile { sub: String, amb: String },
    #[error("operands belong to different algebras")]
    MixedAlgebras,
    #[error("unknown algebra element `{0}`")]
    UnknownElement(String),
    #[error("`{name}` is not an element of the algebra with profile {profile}")]
    NotInAlgebra { name: String, profile: String },
    #[error("element is not homogeneous")]
    NotHomogeneous,
    #[error("`{0}` does not square to zero")]
    NotSquareZero(String),

    #[error("action of {op} on basis element {src} does not land in degree {expected}")]
    DegreeInconsistent { op: String, src: usize, expected: i32 },
    #[error("invalid module document: {0}")]
    InvalidDocument(String),
    #[error("declared operations do not generate the algebra (missing degree {degree})")]
    NotGenerating { degree: i32 },
    #[error("module axiom fails: {0}")]
    ModuleAxiom(String),
    #[error("map does not commute with the action of {0}")]
    NotModuleMap(String),

    #[error("module is not stably invertible")]
    NotInvertible,

    #[error(
        "window too small: need s <= {needed_s}, t <= {needed_t} but the resolution stops at s = {s_max}, t = {t_max}"
    )]
    WindowTooSmall { needed_s: usize, needed_t: i32, s_max: usize, t_max: i32 },
    #[error("classes come from different resolutions")]
    ForeignClass,
    #[error("Yoneda products need a resolution of the unit module")]
    ProductNeedsUnit,
    #[error("`{0}` does not define a class in Ext^1: its dual functional is nonzero on decomposables")]
    NotIndecomposable(String),

    #[error("cannot parse polynomial `{0}`")]
    BadPolynomial(String),
    #[error("unknown May generator `{0}` for this profile")]
    UnknownGenerator(String),
    #[error("table entry d{page}({from}) = {target}: {reason}")]
    BadTableEntry { page: usize, from: String, target: String, reason: String },
    #[error("differentials on page {page} violate the Leibniz rule in bidegree (s, t) = ({s}, {t})")]
    LeibnizConflict { page: usize, s: usize, t: i32 },

    #[error("quotient of {amb} by {sub} is not exterior on one generator")]
    NotRankOneExterior { sub: String, amb: String },
    #[error("Ext^(1,{t}) has dimension {dim}; the class theta must be designated explicitly")]
    ThetaNotUnique { t: i32, dim: usize },
    #[error("nilpotency undecided: no power up to {cap} vanishes")]
    CapExhausted { cap: usize },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
