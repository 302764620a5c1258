//! Fractional network codes over prime fields, exact rate regions, and
//! linear rank inequalities on subspace arrangements.

pub mod ff;
pub mod parallel;
pub mod netmodel;
pub mod codes;
pub mod subspace;
pub mod rankineq;
pub mod rateregion;
