pub mod algebra;
pub mod analysis;
pub mod cone;
pub mod network;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod parser;
pub mod polynomialize;
pub mod sensitivity;
