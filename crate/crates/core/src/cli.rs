//! Command-line front end. Exit codes: 0 success, 1 a checked property
//! failed, 2 bad input.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::congruence::{
    boundary_pair, con_lattice, principal_congruence, reconstruct_from_pair, Congruence,
};
use crate::fork_eye::{eyes, insert_eye, insert_fork, is_slim, CoveringSquare};
use crate::io::{emit_dot, emit_lat, parse, Highlight, LatticeFile};
use crate::lattice::{Elem, Lattice};
use crate::pipeline::{extend_all, represent, step2, PipelineError, PipelineOptions, SearchOptions};
use crate::planar::{
    glue, is_patch, is_rectangular, theorem_rectang_check, GlueSide, PlanarDiagram,
};

#[derive(Parser, Debug)]
#[command(name = "semilat", version, about = "Planar semimodular lattices and their congruences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Side {
    /// Second lattice below-left of the first.
    Ll,
    /// Second lattice below-right of the first.
    Lr,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report lattice, semimodular, rectangular, patch and slim properties.
    Check { file: PathBuf },
    /// Blocks of the principal congruence con(a, b).
    Con { file: PathBuf, a: Elem, b: Elem },
    /// All congruences with join-irreducible and principal flags.
    Conlat { file: PathBuf },
    /// Insert a fork at the covering square {o; l, r; t}.
    Fork { file: PathBuf, o: Elem, l: Elem, r: Elem, t: Elem },
    /// Insert an eye into the covering square {o; l, r; t}.
    Eye { file: PathBuf, o: Elem, l: Elem, r: Elem, t: Elem },
    /// Rectangular gluing of A (upper) and B (lower).
    Glue {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum)]
        side: Side,
    },
    /// Glue the diagonal-eye grid below-right of the lower right chain.
    Step2 { file: PathBuf },
    /// Run the whole extension and report.
    Extend {
        file: PathBuf,
        /// Directory for stage files, witness table and DOT output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also expand congruences that are already principal.
        #[arg(long)]
        expand_all: bool,
    },
    /// Find K whose congruence lattice is the given distributive lattice.
    Represent {
        file: PathBuf,
        #[arg(long, default_value_t = 8)]
        budget: usize,
    },
    /// Graphviz output, optionally colored by con(a, b).
    Dot {
        file: PathBuf,
        #[arg(long, num_args = 2, value_names = ["A", "B"])]
        congruence: Option<Vec<Elem>>,
    },
    /// Check the rectangular-lattice facts and the boundary reconstruction.
    Verify { file: PathBuf },
}

/// Failure of a command: an exit code and a message.
struct Failure {
    code: i32,
    message: String,
}

fn input(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

type Outcome = Result<i32, Failure>;

/// Runs the command line `args` (program name first).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut buf = String::new();
    let result = dispatch(cli.command, &mut buf);
    let _ = out.write_all(buf.as_bytes());
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn load(path: &Path) -> Result<LatticeFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_diagram(path: &Path) -> Result<PlanarDiagram, Failure> {
    load(path)?.diagram.ok_or_else(|| {
        input(format!("{}: no diagram (add uporder/downorder lines)", path.display()))
    })
}

fn check_elems(l: &Lattice, xs: &[Elem]) -> Result<(), Failure> {
    match xs.iter().find(|&&x| x >= l.len()) {
        Some(x) => Err(input(format!("element {x} out of range 0..{}", l.len()))),
        None => Ok(()),
    }
}

fn pipeline_failure(e: PipelineError) -> Failure {
    match e {
        PipelineError::SearchExhausted(_) => Failure { code: 1, message: e.to_string() },
        _ => input(e.to_string()),
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn blocks(theta: &Congruence) -> String {
    theta
        .blocks()
        .iter()
        .map(|b| format!("{{{}}}", b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
        .collect::<Vec<_>>()
        .join(" ")
}

fn dispatch(cmd: Command, o: &mut String) -> Outcome {
    match cmd {
        Command::Check { file } => {
            let f = load(&file)?;
            let l = &f.lattice;
            writeln!(o, "elements: {}", l.len()).unwrap();
            writeln!(o, "covers: {}", l.num_covers()).unwrap();
            writeln!(o, "lattice: yes").unwrap();
            writeln!(o, "semimodular: {}", yes(l.is_semimodular())).unwrap();
            writeln!(o, "distributive: {}", yes(l.is_distributive())).unwrap();
            match &f.diagram {
                None => writeln!(o, "diagram: no").unwrap(),
                Some(d) => {
                    writeln!(o, "diagram: yes").unwrap();
                    match is_rectangular(d) {
                        Some((lc, rc)) => {
                            writeln!(o, "rectangular: yes (lcorner {lc}, rcorner {rc})").unwrap()
                        }
                        None => writeln!(o, "rectangular: no").unwrap(),
                    }
                    writeln!(o, "patch: {}", yes(is_patch(d))).unwrap();
                    writeln!(o, "slim: {}", yes(is_slim(d))).unwrap();
                    writeln!(o, "eyes: {:?}", eyes(d)).unwrap();
                }
            }
            Ok(0)
        }
        Command::Con { file, a, b } => {
            let f = load(&file)?;
            check_elems(&f.lattice, &[a, b])?;
            let theta = principal_congruence(&f.lattice, a, b);
            writeln!(o, "con({a}, {b}) = {}", blocks(&theta)).unwrap();
            Ok(0)
        }
        Command::Conlat { file } => {
            let f = load(&file)?;
            let l = &f.lattice;
            let cl = con_lattice(l);
            let wit = cl.principal_witnesses(l);
            let ji = cl.join_irreducibles().len();
            let all = wit.iter().all(Option::is_some);
            writeln!(
                o,
                "Con: {} congruences, {ji} join-irreducible, all principal: {}",
                cl.len(),
                yes(all)
            )
            .unwrap();
            for (i, theta) in cl.congruences().iter().enumerate() {
                let p = match wit[i] {
                    Some(iv) => format!("con({}, {})", iv.lo, iv.hi),
                    None => "no".into(),
                };
                writeln!(
                    o,
                    "{i}: {}  ji: {}  principal: {p}",
                    blocks(theta),
                    yes(cl.is_join_irreducible(i))
                )
                .unwrap();
            }
            Ok(0)
        }
        Command::Fork { file, o: so, l, r, t } => {
            let d = load_diagram(&file)?;
            check_elems(d.lattice(), &[so, l, r, t])?;
            let f = insert_fork(&d, CoveringSquare { o: so, l, r, t }).map_err(|e| input(e.to_string()))?;
            writeln!(o, "# new elements: {:?}", f.new_elements).unwrap();
            writeln!(o, "# left terminal: {}", f.left_terminal).unwrap();
            writeln!(o, "# right terminal: {}", f.right_terminal).unwrap();
            o.push_str(&emit_lat(&f.diagram));
            Ok(0)
        }
        Command::Eye { file, o: so, l, r, t } => {
            let d = load_diagram(&file)?;
            check_elems(d.lattice(), &[so, l, r, t])?;
            let (out, _, x) =
                insert_eye(&d, CoveringSquare { o: so, l, r, t }).map_err(|e| input(e.to_string()))?;
            writeln!(o, "# new element: {x}").unwrap();
            o.push_str(&emit_lat(&out));
            Ok(0)
        }
        Command::Glue { a, b, side } => {
            let da = load_diagram(&a)?;
            let db = load_diagram(&b)?;
            let side = match side {
                Side::Ll => GlueSide::LowerLeft,
                Side::Lr => GlueSide::LowerRight,
            };
            let g = glue(&da, &db, side).map_err(|e| input(e.to_string()))?;
            writeln!(o, "# second lattice ids: {:?}", g.embed_b.map()).unwrap();
            o.push_str(&emit_lat(&g.diagram));
            Ok(0)
        }
        Command::Step2 { file } => {
            let d = load_diagram(&file)?;
            let s = step2(&d).map_err(pipeline_failure)?;
            for w in &s.witnesses {
                writeln!(o, "# {} -> {} (step {})", blocks(&w.congruence), w.interval, w.position).unwrap();
            }
            o.push_str(&emit_lat(&s.diagram));
            Ok(0)
        }
        Command::Extend { file, out, expand_all } => {
            let d = load_diagram(&file)?;
            let trace = extend_all(&d, PipelineOptions { expand_all }).map_err(pipeline_failure)?;
            let k = trace.output();
            let cl = con_lattice(k.lattice());
            let mut table = String::new();
            for w in &trace.witnesses {
                let iv = w.interval.map_or("none".to_string(), |iv| format!("con({}, {})", iv.lo, iv.hi));
                writeln!(table, "{}  =>  {}", blocks(&w.congruence), iv).unwrap();
            }
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir).map_err(|e| input(format!("{}: {e}", dir.display())))?;
                let write = |name: String, text: &str| {
                    std::fs::write(dir.join(&name), text).map_err(|e| input(format!("{name}: {e}")))
                };
                for (i, s) in trace.stages.iter().enumerate() {
                    let name = s.name.replace(['[', ']'], "_").trim_end_matches('_').to_string();
                    write(format!("stage_{i:02}_{name}.lat"), &emit_lat(&s.diagram))?;
                }
                write("witnesses.txt".into(), &table)?;
                write("final.dot".into(), &emit_dot(k, Highlight::None))?;
            }
            let r = trace.report;
            writeln!(o, "stages: {}", trace.stages.len()).unwrap();
            writeln!(o, "K: {} elements", k.len()).unwrap();
            writeln!(o, "rectangular: {}", yes(r.rectangular)).unwrap();
            writeln!(o, "cover-preserving: {}", yes(r.cover_preserving)).unwrap();
            writeln!(o, "congruence-preserving: {}", yes(r.congruence_preserving)).unwrap();
            writeln!(o, "Con: {} congruences, all principal: {}", cl.len(), yes(r.all_principal)).unwrap();
            o.push_str(&table);
            Ok(if r.passed() { 0 } else { 1 })
        }
        Command::Represent { file, budget } => {
            let f = load(&file)?;
            let rep = represent(&f.lattice, SearchOptions { budget, ..SearchOptions::default() })
                .map_err(pipeline_failure)?;
            let (m, n) = rep.grid;
            let mut how = format!("grid({m},{n})");
            for ins in &rep.insertions {
                write!(how, ", {ins}").unwrap();
            }
            writeln!(o, "K1: {how} ({} elements)", rep.k1.len()).unwrap();
            let k = rep.trace.output();
            writeln!(o, "K: {} elements, all principal: {}", k.len(), yes(rep.trace.report.all_principal)).unwrap();
            writeln!(o, "# element of D => congruence of K").unwrap();
            for (x, theta) in rep.table.iter().enumerate() {
                writeln!(o, "{x} => {}", blocks(theta)).unwrap();
            }
            o.push_str(&emit_lat(k));
            Ok(if rep.trace.report.passed() { 0 } else { 1 })
        }
        Command::Dot { file, congruence } => {
            let d = load_diagram(&file)?;
            match congruence.as_deref() {
                Some(&[a, b]) => {
                    check_elems(d.lattice(), &[a, b])?;
                    let theta = principal_congruence(d.lattice(), a, b);
                    o.push_str(&emit_dot(&d, Highlight::Congruence(&theta)));
                }
                _ => o.push_str(&emit_dot(&d, Highlight::None)),
            }
            Ok(0)
        }
        Command::Verify { file } => {
            let d = load_diagram(&file)?;
            if is_rectangular(&d).is_none() {
                return Err(input(format!("{}: not a rectangular lattice", file.display())));
            }
            let report = theorem_rectang_check(&d).map_err(|e| input(e.to_string()))?;
            let mut ok = true;
            for (item, pass) in report.items() {
                writeln!(o, "{item}: {}", if pass { "pass" } else { "FAIL" }).unwrap();
                ok &= pass;
            }
            let l = d.lattice();
            let cl = con_lattice(l);
            let mut rebuilt = 0;
            let mut p_ok = true;
            for theta in cl.congruences() {
                let (pl, pr) = boundary_pair(&d, theta).map_err(|e| input(e.to_string()))?;
                let back = reconstruct_from_pair(&d, &pl, &pr).map_err(|e| input(e.to_string()))?;
                if &back == theta {
                    rebuilt += 1;
                }
                p_ok &= l.covers().iter().all(|&(a, b)| theta.same(a, b) == back.same(a, b));
            }
            writeln!(o, "boundary reconstruction: {rebuilt}/{} congruences", cl.len()).unwrap();
            writeln!(o, "condition (P): {}", if p_ok { "pass" } else { "FAIL" }).unwrap();
            ok &= rebuilt == cl.len() && p_ok;
            Ok(if ok { 0 } else { 1 })
        }
    }
}
