use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use polyk::input::{load, InputError};
use polyk::report::{face_label, micros, ReportDocument, Sections, Timing};
use polyk_core::comb_type::{lattice_from_incidence, Bijection};
use polyk_core::{is_isomorphic, strip_signs, FaceLattice, LatticeIso, Pipeline, Polytope};
use serde::Serialize;

const EXIT_INPUT: u8 = 1;
const EXIT_INTERNAL: u8 = 2;
const EXIT_NOT_ISOMORPHIC: u8 = 3;

#[derive(Parser)]
#[command(
    name = "polyk",
    version,
    about = "Exact cellular chain complexes and K-theory reports for rational polytopes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a file describes a full-dimensional polytope by its vertices.
    Validate { file: PathBuf },
    /// Run the full pipeline and print the report.
    Report {
        file: PathBuf,
        #[command(flatten)]
        opts: ReportOpts,
    },
    /// Decide whether two polytopes have the same combinatorial type.
    Compare { a: PathBuf, b: PathBuf },
    /// Report on every *.json file of a directory.
    Corpus {
        dir: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Clone, Copy)]
struct ReportOpts {
    #[arg(long)]
    faces: bool,
    #[arg(long)]
    boundary: bool,
    #[arg(long)]
    homology: bool,
    #[arg(long)]
    ktheory: bool,
    #[arg(long)]
    json: bool,
    /// Include wall-clock timings (makes output nondeterministic).
    #[arg(long)]
    timing: bool,
    /// Corrupt one boundary entry after the complex is built.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

impl ReportOpts {
    fn sections(&self) -> Sections {
        Sections {
            faces: self.faces,
            boundary: self.boundary,
            homology: self.homology,
            ktheory: self.ktheory,
        }
        .or_all()
    }
}

enum Failure {
    Input(InputError),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Input(e) => e.to_string(),
            Failure::Internal(m) => format!("internal invariant violation: {m}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Validate { file } => validate(&file),
        Command::Report { file, opts } => report(&file, opts),
        Command::Compare { a, b } => compare(&a, &b),
        Command::Corpus { dir, json } => corpus(&dir, json),
    };
    ExitCode::from(code)
}

fn validate(file: &Path) -> u8 {
    match load(file) {
        Ok(_) => {
            println!("valid");
            0
        }
        Err(e) => {
            eprintln!("{}: {e}", file.display());
            EXIT_INPUT
        }
    }
}

/// The document is returned even when the complex turns out broken, so the
/// caller can show what went wrong.
fn run_report(file: &Path, opts: ReportOpts) -> Result<(ReportDocument, Option<String>), Failure> {
    let polytope = load(file).map_err(Failure::Input)?;
    let start = Instant::now();
    let mut pipe = Pipeline::run(polytope).map_err(|e| Failure::Internal(e.to_string()))?;
    if opts.inject_fault {
        inject_fault(&mut pipe);
    }
    let pipeline_us = micros(start.elapsed());
    let start = Instant::now();
    let k = pipe.report();
    let report_us = micros(start.elapsed());
    let timing = opts.timing.then_some(Timing {
        pipeline_us,
        report_us,
    });
    let doc = ReportDocument::build(&pipe, &k, opts.sections(), timing);
    let broken = match pipe.complex.verify() {
        Err(e) => Some(e.to_string()),
        Ok(()) if !k.is_consistent() => Some(k.falsifications.join("; ")),
        Ok(()) => None,
    };
    Ok((doc, broken))
}

// Negates the first nonzero entry of D_1. A point has only D_0, where a sign
// flip is harmless, so its entry is doubled instead.
fn inject_fault(pipe: &mut Pipeline) {
    let j = if pipe.lattice.dim() >= 1 { 1 } else { 0 };
    let mut m = pipe.complex.boundary(j).clone();
    let (r, c) = (0..m.rows())
        .flat_map(|r| (0..m.cols()).map(move |c| (r, c)))
        .find(|&(r, c)| !num_traits::Zero::is_zero(&m[(r, c)]))
        .expect("boundary matrices have nonzero entries");
    let factor = if j == 1 { -1 } else { 2 };
    let corrupted = &m[(r, c)] * factor;
    m[(r, c)] = corrupted;
    pipe.complex = pipe.complex.clone().with_boundary_unchecked(j, m);
}

fn report(file: &Path, opts: ReportOpts) -> u8 {
    match run_report(file, opts) {
        Ok((doc, broken)) => {
            if opts.json {
                print!("{}", doc.to_json());
            } else {
                print!("{}", doc.to_text());
            }
            match broken {
                Some(msg) => {
                    eprintln!("{}: internal invariant violation: {msg}", file.display());
                    EXIT_INTERNAL
                }
                None => 0,
            }
        }
        Err(f) => {
            eprintln!("{}: {}", file.display(), f.message());
            f.code()
        }
    }
}

fn combinatorial_lattice(p: Polytope) -> Result<FaceLattice, Failure> {
    let pipe = Pipeline::run(p).map_err(|e| Failure::Internal(e.to_string()))?;
    lattice_from_incidence(&strip_signs(&pipe.complex))
        .map_err(|e| Failure::Internal(e.to_string()))
}

fn compare(a: &Path, b: &Path) -> u8 {
    let lattices = [a, b].map(|f| {
        load(f)
            .map_err(Failure::Input)
            .and_then(combinatorial_lattice)
            .map_err(|e| (f, e))
    });
    let [la, lb] = match lattices {
        [Ok(la), Ok(lb)] => [la, lb],
        [Err((f, e)), _] | [_, Err((f, e))] => {
            eprintln!("{}: {}", f.display(), e.message());
            return e.code();
        }
    };
    match is_isomorphic(&la, &lb) {
        LatticeIso::Isomorphic(bij) => {
            print!("{}", render_bijection(&la, &lb, &bij));
            0
        }
        LatticeIso::NotIsomorphic(why) => {
            println!("not isomorphic: {why}");
            EXIT_NOT_ISOMORPHIC
        }
    }
}

fn render_bijection(a: &FaceLattice, b: &FaceLattice, bij: &Bijection) -> String {
    let mut out = format!(
        "isomorphic: {}-face bijection{}\n",
        a.len(),
        if bij.is_identity() { " (identity)" } else { "" }
    );
    for id in a.ids() {
        let image = bij.image(id);
        out.push_str(&format!(
            "  dim {:>2}: {} -> {}\n",
            id.dim,
            face_label(a.face(id)),
            face_label(b.face(image))
        ));
    }
    out
}

#[derive(Serialize)]
struct CorpusEntry {
    file: String,
    exit: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<ReportDocument>,
}

fn corpus(dir: &Path, json: bool) -> u8 {
    let mut files: Vec<PathBuf> = match std::fs::read_dir(dir) {
        Ok(rd) => rd
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect(),
        Err(e) => {
            eprintln!("{}: cannot read directory: {e}", dir.display());
            return EXIT_INPUT;
        }
    };
    files.sort();
    let opts = ReportOpts {
        faces: false,
        boundary: false,
        homology: true,
        ktheory: true,
        json,
        timing: false,
        inject_fault: false,
    };
    let mut worst = 0;
    let mut entries = Vec::new();
    for f in &files {
        let name = f
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let entry = match run_report(f, opts) {
            Ok((doc, None)) => CorpusEntry {
                file: name,
                exit: 0,
                error: None,
                report: Some(doc),
            },
            Ok((doc, Some(msg))) => CorpusEntry {
                file: name,
                exit: EXIT_INTERNAL,
                error: Some(msg),
                report: Some(doc),
            },
            Err(e) => CorpusEntry {
                file: name,
                exit: e.code(),
                error: Some(e.message()),
                report: None,
            },
        };
        if let Some(e) = &entry.error {
            eprintln!("{}: {e}", f.display());
        }
        worst = worst.max(entry.exit);
        entries.push(entry);
    }
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&entries).expect("corpus serializes")
        );
    } else {
        for e in &entries {
            match &e.report {
                Some(doc) => {
                    let k = doc.ktheory.as_ref().expect("ktheory section requested");
                    let f: Vec<String> = doc.f_vector.iter().map(usize::to_string).collect();
                    println!(
                        "{:<24} f=({}) K(A)=({}, {}) K(A/K)=({}, {}){}",
                        e.file,
                        f.join(","),
                        k.k_algebra.k0,
                        k.k_algebra.k1,
                        k.k_quotient.k0,
                        k.k_quotient.k1,
                        if k.falsifications.is_empty() {
                            ""
                        } else {
                            " FLAGGED"
                        }
                    );
                }
                None => println!("{:<24} error", e.file),
            }
        }
    }
    worst
}
