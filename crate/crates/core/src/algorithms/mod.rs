//! Payment computation procedures and the checks built on them.

pub mod reach;
pub mod threshold;
pub mod tie;
pub mod translate;
pub mod unique_payments;
