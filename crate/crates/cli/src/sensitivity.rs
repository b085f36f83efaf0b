use std::path::Path;

use acr_core::algebra::rational::fmt_rational;
use acr_core::network::PowerLawSystem;
use acr_core::parser::{parse_points, PointSpec};
use acr_core::sensitivity::{
    all_canonical, classify_degeneracy, zero_sensitivity_test, DegeneracyClass, SensitivityError,
    SteadyStatePoint,
};
use serde::Serialize;

use crate::input::{load_system, read, species_index, FileError};
use crate::scan::SCHEMA;
use crate::style::{number, status, tuple};
use crate::{Format, Outcome};

pub const FINITE_FIBERS_NOTE: &str =
    "s = n: every sensitivity is vacuously zero (finite fibers, no conservation laws)";

#[derive(Debug, Serialize)]
struct SensitivityOutput {
    schema: u32,
    network: String,
    species: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
    points: Vec<PointOutput>,
}

#[derive(Debug, Serialize)]
struct PointOutput {
    line: usize,
    k: Vec<String>,
    x: Vec<String>,
    #[serde(flatten)]
    result: PointResult,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum PointResult {
    Ok(PointReport),
    Error(String),
}

#[derive(Debug, Serialize)]
struct PointReport {
    residual: f64,
    degeneracy: DegeneracyClass,
    /// `Sen_{γ_j}` for each canonical `j`, one value per species.
    sensitivities: Vec<Vec<f64>>,
    zero_sensitivity: Vec<ZeroVerdict>,
}

#[derive(Debug, Serialize)]
struct ZeroVerdict {
    species: String,
    zero: bool,
}

fn evaluate(
    sys: &PowerLawSystem,
    pt: &PointSpec,
    species: &[usize],
) -> Result<PointReport, SensitivityError> {
    let p = SteadyStatePoint::admit_exact(sys, pt.k.clone(), pt.x.clone())?;
    let degeneracy = classify_degeneracy(sys, &p)?;
    if !degeneracy.is_nondegenerate_wrt_s() {
        return Err(SensitivityError::DegenerateWrtS);
    }
    let sensitivities = all_canonical(sys, &p)?
        .into_iter()
        .map(|s| s.values)
        .collect();
    let zero_sensitivity = species
        .iter()
        .map(|&i| {
            Ok(ZeroVerdict {
                species: sys.species()[i].clone(),
                zero: zero_sensitivity_test(sys, &p, i)?,
            })
        })
        .collect::<Result<_, SensitivityError>>()?;
    Ok(PointReport {
        residual: p.residual,
        degeneracy,
        sensitivities,
        zero_sensitivity,
    })
}

pub fn run(network: &Path, points: &Path, species: Option<&str>, format: Format) -> Outcome {
    let sys = match load_system(network) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{}", e.render(network));
            return Outcome::InputError;
        }
    };
    let specs = match read(points).and_then(|t| {
        parse_points(&t, sys.num_reactions(), sys.num_species()).map_err(FileError::from)
    }) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{}", e.render(points));
            return Outcome::InputError;
        }
    };
    let selected: Vec<usize> = match species {
        Some(name) => match species_index(&sys, name) {
            Ok(i) => vec![i],
            Err(e) => {
                eprintln!("{e}");
                return Outcome::InputError;
            }
        },
        None => (0..sys.num_species()).collect(),
    };
    if specs.is_empty() {
        eprintln!("{}: no points", points.display());
        return Outcome::InputError;
    }
    let notes = if sys.codimension() == 0 {
        vec![FINITE_FIBERS_NOTE.to_string()]
    } else {
        Vec::new()
    };
    let output = SensitivityOutput {
        schema: SCHEMA,
        network: network.display().to_string(),
        species: sys.species().to_vec(),
        notes,
        points: specs
            .iter()
            .map(|pt| PointOutput {
                line: pt.line,
                k: pt.k.iter().map(fmt_rational).collect(),
                x: pt.x.iter().map(fmt_rational).collect(),
                result: match evaluate(&sys, pt, &selected) {
                    Ok(r) => PointResult::Ok(r),
                    Err(e) => PointResult::Error(e.to_string()),
                },
            })
            .collect(),
    };
    let failures = output
        .points
        .iter()
        .filter(|p| matches!(p.result, PointResult::Error(_)))
        .count();
    match format {
        Format::Json => match serde_json::to_string(&output) {
            Ok(s) => println!("{s}"),
            Err(e) => {
                eprintln!("internal error: {e}");
                return Outcome::Internal;
            }
        },
        Format::Text => print!("{}", render_text(&output)),
    }
    if failures == output.points.len() {
        Outcome::InputError
    } else {
        Outcome::Ok
    }
}

fn render_text(out: &SensitivityOutput) -> String {
    let mut s = String::new();
    for note in &out.notes {
        s += &format!("note: {note}\n");
    }
    let width = out
        .species
        .iter()
        .map(String::len)
        .max()
        .unwrap_or(0)
        .max("species".len());
    for (idx, pt) in out.points.iter().enumerate() {
        s += &format!(
            "point {} (line {}): k = {}, x = {}\n",
            idx + 1,
            pt.line,
            tuple(pt.k.iter().cloned()),
            tuple(pt.x.iter().cloned())
        );
        let r = match &pt.result {
            PointResult::Ok(r) => r,
            PointResult::Error(e) => {
                s += &format!("  rejected: {e}\n");
                continue;
            }
        };
        let d = &r.degeneracy;
        s += &format!(
            "  residual {}; {}, {} (rank dg/dx = {}, rank [dg/dx; W] = {}{})\n",
            number(r.residual),
            status(&d.plain),
            status(&d.wrt_s),
            d.jacobian_rank,
            d.augmented_rank,
            if d.exact { ", exact" } else { "" }
        );
        if !r.sensitivities.is_empty() {
            s += &format!("  {:<width$}", "species");
            for j in 0..r.sensitivities.len() {
                s += &format!("  {:>13}", format!("Sen_gamma{}", j + 1));
            }
            s += "\n";
            for (i, name) in out.species.iter().enumerate() {
                s += &format!("  {name:<width$}");
                for col in &r.sensitivities {
                    s += &format!("  {:>13}", number(col[i]));
                }
                s += "\n";
            }
        }
        let verdicts: Vec<String> = r
            .zero_sensitivity
            .iter()
            .map(|z| format!("{} {}", z.species, if z.zero { "yes" } else { "no" }))
            .collect();
        s += &format!("  zero sensitivity: {}\n", verdicts.join(", "));
    }
    s
}
