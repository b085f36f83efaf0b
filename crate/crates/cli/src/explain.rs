use std::path::Path;

use acr_core::algebra::rational::fmt_rational;
use acr_core::analysis::{
    analyze_detailed, AnalysisOptions, AnalysisReport, NondegeneracyEvidence,
};

use crate::input::{load_system, species_index};
use crate::style::{label, status, tuple};
use crate::Outcome;

pub fn run(path: &Path, species: Option<&str>, opts: &AnalysisOptions) -> Outcome {
    let sys = match load_system(path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{}", e.render(path));
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
    let a = match analyze_detailed(&sys, opts) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{}: internal error: {e}", path.display());
            return Outcome::Internal;
        }
    };
    let report = AnalysisReport::new(&sys, &a, opts);
    let names = sys.species();
    let cols = |c: &[usize]| tuple(c.iter().map(|&i| names[i].clone()));

    println!("species: {}", names.join(", "));
    println!("rates: {}", sys.rates().join(", "));
    println!(
        "n = {}, r = {}, s = {}, d = {}",
        sys.num_species(),
        sys.num_reactions(),
        sys.rank(),
        sys.codimension()
    );
    println!("\ncoefficient matrix N:\n{}", sys.coefficient_matrix());
    println!("exponent matrix B:\n{}", sys.exponents());
    match sys.conservation() {
        Some(w) => println!("conservation matrix W:\n{w}"),
        None => println!("conservation matrix W: none"),
    }

    println!("\nkernel basis of N:");
    for (i, w) in a.jacobian.basis().iter().enumerate() {
        println!("  w{} = {}", i + 1, tuple(w.iter().map(fmt_rational)));
    }
    let v = a.jacobian.kernel_vector();
    println!(
        "kernel vector v(a) = {}",
        tuple(v.iter().map(ToString::to_string))
    );
    println!("convex Jacobian N·diag(v(a))·Bᵗ:\n{}", a.jacobian.matrix());

    println!("extreme rays of ker N ∩ R^r_>=0:");
    for (i, e) in report.extreme_rays.iter().enumerate() {
        println!("  E{} = {}", i + 1, tuple(e.iter().cloned()));
    }
    if a.rays.is_empty() {
        println!("  none");
    }

    let nd = &a.nondegeneracy;
    println!("\nnon-degeneracy: {}", status(&nd.status));
    match &nd.evidence {
        NondegeneracyEvidence::FreeMinor { minor } => {
            println!(
                "  minor on {} in free fluxes has coefficients of one sign:",
                cols(&minor.cols)
            );
            println!("  {}", minor.value);
        }
        NondegeneracyEvidence::RayMinor { minor, matrix } => {
            println!("  Jacobian in ray coordinates:\n{matrix}");
            println!(
                "  minor on {} has coefficients of one sign:",
                cols(&minor.cols)
            );
            println!("  {}", minor.value);
        }
        NondegeneracyEvidence::Sample { v } => {
            println!(
                "  every s×s minor vanishes at v = {}",
                tuple(v.iter().map(fmt_rational))
            );
        }
        NondegeneracyEvidence::None => {
            if nd.samples_tried > 0 {
                println!(
                    "  no certificate; {} samples were nondegenerate",
                    nd.samples_tried
                );
            }
        }
    }

    match &a.divisibility_polynomial {
        Some(p) => println!("\ndivisibility polynomial p_v(h) = {p}"),
        None => println!("\ndivisibility polynomial: not available"),
    }

    for &i in &selected {
        let sp = &a.species[i];
        println!("\n{}:", names[i]);
        match &sp.acr {
            Some(v) => {
                println!("  local ACR: {}", status(&v.status));
                if v.vacuous {
                    println!("  s = n: no s×s minor avoids this column");
                }
                if let Some(w) = &v.witness {
                    println!("  minor on {} = {}", cols(&w.cols), w.value);
                }
                for c in &v.conditions {
                    println!("  requires {c} = 0");
                }
            }
            None => println!("  local ACR: not decided (empty flux cone)"),
        }
        println!("  divisibility by h{}: {}", i + 1, label(&sp.divisibility));
        if let Some(z) = sp.zero_sensitivity_implied {
            println!(
                "  zero sensitivity at non-degenerate points: {}",
                if z { "implied" } else { "not implied" }
            );
        }
    }
    if !a.notes.is_empty() {
        println!();
    }
    for note in &a.notes {
        println!("note: {note}");
    }
    Outcome::Ok
}
