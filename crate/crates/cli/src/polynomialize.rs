use std::path::Path;

use acr_core::parser::parse_generalized;
use acr_core::polynomialize::polynomialize;
use serde::Serialize;

use crate::input::{read, FileError};
use crate::scan::SCHEMA;
use crate::{Format, Outcome};

#[derive(Debug, Serialize)]
struct PolynomializeOutput {
    schema: u32,
    identity: bool,
    m: Vec<u32>,
    beta: Vec<Vec<u32>>,
    gtilde: Vec<String>,
}

pub const IDENTITY_NOTICE: &str = "all exponents are integers: the transform is the identity";

pub fn run(path: &Path, format: Format) -> Outcome {
    let result = read(path).and_then(|text| Ok(parse_generalized(&text)?));
    let g = match result {
        Ok(g) => g,
        Err(e) => {
            eprintln!("{}", e.render(path));
            return Outcome::InputError;
        }
    };
    let p = match polynomialize(&g) {
        Ok(p) => p,
        Err(e) => {
            let e = FileError::Model {
                message: e.to_string(),
            };
            eprintln!("{}", e.render(path));
            return Outcome::InputError;
        }
    };
    match format {
        Format::Text => {
            print!("{g}");
            if p.is_identity() {
                println!("{IDENTITY_NOTICE}");
            }
            print!("{p}");
        }
        Format::Json => {
            let out = PolynomializeOutput {
                schema: SCHEMA,
                identity: p.is_identity(),
                m: p.m.clone(),
                beta: p.beta.clone(),
                gtilde: p.gtilde.iter().map(ToString::to_string).collect(),
            };
            match serde_json::to_string(&out) {
                Ok(s) => println!("{s}"),
                Err(e) => {
                    eprintln!("internal error: {e}");
                    return Outcome::Internal;
                }
            }
        }
    }
    Outcome::Ok
}
