// Negated float comparisons reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cyclotomic;
pub mod eichler;
pub mod error;
pub mod hpc;
pub mod lfunctions;
pub mod modularforms;
pub mod qseries;
pub mod quadrature;
pub mod strange;
