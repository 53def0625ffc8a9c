//! Problem input, certificate formats and DOT export.

pub mod tptp;

pub use tptp::{
    parse_clause, parse_literal, parse_term, parse_tptp_cnf, NamedClause, ParseError, ProblemFile, Signature,
};
pub mod cert;
pub mod dot;

pub use cert::{load_certificate, parse_certificate, Calculus, CertError, Certificate, Proof};
pub use dot::export_dot;
