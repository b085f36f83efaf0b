use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use acr_core::analysis::{analyze, AnalysisOptions, AnalysisReport, EvidenceReport};
use rayon::prelude::*;
use serde::Serialize;
use walkdir::WalkDir;

use crate::input::{load_system, FileError};
use crate::style::{label, status, tuple};
use crate::{Format, Outcome};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Serialize)]
pub struct ScanOutput {
    pub schema: u32,
    pub seed: u64,
    pub samples: usize,
    pub files: Vec<FileResult>,
}

#[derive(Debug, Serialize)]
pub struct FileResult {
    pub path: String,
    #[serde(flatten)]
    pub outcome: FileOutcome,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FileOutcome {
    Report(Box<AnalysisReport>),
    Error(FileError),
}

/// Explicit paths in the order given; directories expand to their `*.crn` files sorted
/// by path.
fn expand(paths: &[PathBuf]) -> Result<Vec<PathBuf>, (PathBuf, FileError)> {
    let mut out = Vec::new();
    for p in paths {
        if !p.is_dir() {
            out.push(p.clone());
            continue;
        }
        let mut found = Vec::new();
        for entry in WalkDir::new(p) {
            let entry = entry.map_err(|e| {
                (
                    p.clone(),
                    FileError::Io {
                        message: e.to_string(),
                    },
                )
            })?;
            if entry.file_type().is_file() && entry.path().extension().is_some_and(|e| e == "crn") {
                found.push(entry.into_path());
            }
        }
        found.sort();
        out.extend(found);
    }
    Ok(out)
}

fn analyze_file(path: &Path, opts: &AnalysisOptions) -> FileOutcome {
    let run = || -> Result<AnalysisReport, FileError> {
        let sys = load_system(path)?;
        analyze(&sys, opts).map_err(|e| FileError::Internal {
            message: e.to_string(),
        })
    };
    match catch_unwind(AssertUnwindSafe(run)) {
        Ok(Ok(report)) => FileOutcome::Report(Box::new(report)),
        Ok(Err(e)) => FileOutcome::Error(e),
        Err(_) => FileOutcome::Error(FileError::Internal {
            message: "analysis panicked".into(),
        }),
    }
}

pub fn scan(paths: &[PathBuf], opts: &AnalysisOptions) -> Result<ScanOutput, (PathBuf, FileError)> {
    let files = expand(paths)?;
    let files = files
        .par_iter()
        .map(|p| FileResult {
            path: p.display().to_string(),
            outcome: analyze_file(p, opts),
        })
        .collect();
    Ok(ScanOutput {
        schema: SCHEMA,
        seed: opts.seed,
        samples: opts.samples,
        files,
    })
}

pub fn run(paths: &[PathBuf], format: Format, opts: &AnalysisOptions) -> Outcome {
    let output = match scan(paths, opts) {
        Ok(o) => o,
        Err((p, e)) => {
            eprintln!("{}", e.render(&p));
            return Outcome::InputError;
        }
    };
    let mut outcome = Outcome::Ok;
    for f in &output.files {
        if let FileOutcome::Error(e) = &f.outcome {
            eprintln!("{}", e.render(Path::new(&f.path)));
            outcome = outcome.max(if e.is_internal() {
                Outcome::Internal
            } else {
                Outcome::InputError
            });
        }
    }
    match format {
        Format::Json => match serde_json::to_string(&output) {
            Ok(s) => println!("{s}"),
            Err(e) => {
                eprintln!("internal error: {e}");
                return Outcome::Internal;
            }
        },
        Format::Text => {
            for f in &output.files {
                if let FileOutcome::Report(r) = &f.outcome {
                    print!("{}", render_text(&f.path, r));
                }
            }
        }
    }
    outcome
}

fn evidence_text(e: &EvidenceReport) -> String {
    match e {
        EvidenceReport::FreeMinor { columns, minor } => {
            format!("free minor on {}: {minor}", tuple(columns.iter().cloned()))
        }
        EvidenceReport::RayMinor { columns, minor, .. } => {
            format!("ray minor on {}: {minor}", tuple(columns.iter().cloned()))
        }
        EvidenceReport::Sample { v } => format!("all minors vanish at v = {}", tuple(v.clone())),
        EvidenceReport::None => "no evidence".into(),
    }
}

pub fn render_text(path: &str, r: &AnalysisReport) -> String {
    let mut out = String::new();
    let sys = &r.system;
    out += &format!("== {path}\n");
    out += &format!("n = {}, r = {}, s = {}, d = {}", sys.n, sys.r, sys.s, sys.d);
    if !sys.symbols.is_empty() {
        out += &format!(", symbols {}", sys.symbols.join(", "));
    }
    out += "\n";
    out += &format!(
        "non-degeneracy: {} ({})\n",
        status(&r.nondegeneracy),
        evidence_text(&r.nondegeneracy_evidence)
    );
    let width = r
        .species
        .iter()
        .map(|s| s.species.len())
        .max()
        .unwrap_or(0)
        .max("species".len());
    out += &format!(
        "  {:<width$}  {:<11}  {:<15}  zero sensitivity\n",
        "species", "local ACR", "divisibility"
    );
    for sp in &r.species {
        let acr = sp.local_acr.as_ref().map_or("-".to_string(), label);
        let acr_colored = sp.local_acr.as_ref().map_or("-".to_string(), status);
        let pad = " ".repeat(11usize.saturating_sub(acr.len()));
        let zero = match sp.zero_sensitivity_implied {
            Some(true) => "implied",
            Some(false) => "not implied",
            None => "-",
        };
        out += &format!(
            "  {:<width$}  {acr_colored}{pad}  {:<15}  {zero}\n",
            sp.species,
            label(&sp.divisibility)
        );
        for c in &sp.conditions {
            out += &format!("  {:<width$}    if {c}\n", "");
        }
    }
    for note in &r.notes {
        out += &format!("note: {note}\n");
    }
    out
}
