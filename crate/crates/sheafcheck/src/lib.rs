pub mod cnf;
pub mod consistency;
pub mod oracle;
pub mod sheaf;
pub mod topology;

pub use cnf::Rational;
