//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 a domain precondition
//! failed (reducible or negative input to `prices`), 64 usage or parse error.

use std::ffi::OsString;
use std::io::{Read, Write};

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use crate::combinatorics::{enumerate_arborescences, enumerate_dangles, weight_vector_enum};
use crate::edgelist::parse_edge_list;
use crate::graph::WeightedDigraph;
use crate::linalg::{IndexSet, Rational};
use crate::symbolic::{verify_symbolic_matrix_tree, SymbolicError};
use crate::theorems::{
    laplacian_minor, market_clearing_prices, signed_forest_sum, verify_all_minors_up_to,
    verify_dangle_identities, verify_harmonic, verify_matrix_tree_with, Normalization,
    TheoremError, VerificationReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "minortree",
    version,
    about = "Exact matrix-tree, all-minors and price computations on weighted digraphs"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Also print decimal approximations of rational results.
    #[arg(long, global = true)]
    pub decimal: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    /// One JSON record per line.
    #[value(alias = "json")]
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormalizeArg {
    Sum1,
    Primitive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Count,
    Sum,
    List,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckArg {
    Harmonic,
    MatrixTree,
    AllMinors,
    Dangle,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Market-clearing price vector of a nonnegative irreducible graph.
    Prices {
        /// Edge-list file, or `-` for standard input.
        file: String,
        #[arg(long, value_enum, default_value_t = NormalizeArg::Sum1)]
        normalize: NormalizeArg,
    },
    /// Spanning arborescences rooted at a vertex.
    Trees {
        file: String,
        #[arg(long)]
        root: usize,
        #[arg(long, value_enum, default_value_t = Mode::Count)]
        mode: Mode,
    },
    /// Determinant of the Laplacian with rows I and columns J deleted.
    Minor {
        file: String,
        /// Comma-separated row indices, e.g. `1,3`; empty for none.
        #[arg(long, default_value = "")]
        rows: String,
        /// Comma-separated column indices.
        #[arg(long, default_value = "")]
        cols: String,
        /// Also compute the signed forest sum and compare.
        #[arg(long)]
        both: bool,
    },
    /// Run identity checks on a graph.
    Verify {
        file: String,
        #[arg(long, value_enum, default_value_t = CheckArg::All)]
        check: CheckArg,
        /// Largest |I| = |J| tried by the all-minors check.
        #[arg(long, default_value_t = 2)]
        max_subset_size: usize,
    },
    /// Symbolic matrix-tree check on the complete digraph G_n.
    Symbolic {
        #[arg(long = "n")]
        n: usize,
        /// Allow n above the default limit.
        #[arg(long)]
        force: bool,
    },
    /// Spanning dangles through a vertex.
    Dangles {
        file: String,
        #[arg(long)]
        vertex: usize,
        #[arg(long, value_enum, default_value_t = Mode::Count)]
        mode: Mode,
    },
}

/// Fault injection for exercising failure paths; not reachable from flags.
#[doc(hidden)]
#[derive(Debug, Clone, Default)]
pub struct Hooks {
    /// Flip the sign of this cofactor inside the matrix-tree check.
    pub corrupt_cofactor: Option<(usize, usize)>,
}

#[derive(Serialize)]
struct Record<'a> {
    check: &'a str,
    instance: &'a str,
    value: Value,
    pass: bool,
    witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    decimal: Option<Value>,
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    format: Format,
    decimal: bool,
}

/// Outcome of a command: exit code, diagnostics already written.
type Exit = i32;

impl Io<'_> {
    fn fail(&mut self, code: i32, message: impl std::fmt::Display) -> Exit {
        let _ = writeln!(self.err, "error: {message}");
        code
    }

    fn load(&mut self, file: &str) -> Result<(WeightedDigraph, String), Exit> {
        let mut text = String::new();
        let read = if file == "-" {
            self.stdin.read_to_string(&mut text).map(|_| ())
        } else {
            std::fs::read_to_string(file).map(|t| text = t)
        };
        if let Err(e) = read {
            return Err(self.fail(EXIT_USAGE, format!("cannot read {file}: {e}")));
        }
        let instance = if file == "-" { "stdin".to_string() } else { file.to_string() };
        match parse_edge_list(&text) {
            Ok(g) => Ok((g, instance)),
            Err(e) => Err(self.fail(EXIT_USAGE, format!("{instance}: {e}"))),
        }
    }

    fn check_vertex(&mut self, g: &WeightedDigraph, flag: &str, v: usize) -> Result<(), Exit> {
        g.check_vertex(v)
            .map_err(|e| self.fail(EXIT_USAGE, format!("--{flag}: {e}")))
    }

    fn emit(&mut self, record: Record<'_>, text: &str) {
        let _ = match self.format {
            Format::Text => writeln!(self.out, "{text}"),
            Format::Structured => writeln!(
                self.out,
                "{}",
                serde_json::to_string(&record).expect("serializable record")
            ),
        };
    }

    fn emit_report(&mut self, report: &VerificationReport) {
        let record = Record {
            check: report.check().name(),
            instance: report.instance(),
            value: Value::Null,
            pass: report.passed(),
            witness: report.witness().map(ToString::to_string),
            decimal: None,
        };
        self.emit(record, &report.to_string());
    }
}

fn decimal(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

/// Parses a comma-separated index list; the empty string is the empty set.
fn parse_index_list(s: &str) -> Option<IndexSet> {
    let s = s.trim();
    if s.is_empty() {
        return Some(IndexSet::empty());
    }
    let indices: Option<Vec<usize>> = s.split(',').map(|t| t.trim().parse().ok()).collect();
    IndexSet::new(indices?).ok()
}

pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_hooks(args, stdin, out, err, &Hooks::default())
}

#[doc(hidden)]
pub fn run_with_hooks<I, T>(
    args: I,
    stdin: &mut dyn Read,
    out: &mut dyn Write,
    err: &mut dyn Write,
    hooks: &Hooks,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let mut io = Io {
        stdin,
        out,
        err,
        format: cli.format,
        decimal: cli.decimal,
    };
    let result = match cli.command {
        Command::Prices { file, normalize } => cmd_prices(&mut io, &file, normalize),
        Command::Trees { file, root, mode } => cmd_trees(&mut io, &file, root, mode),
        Command::Minor {
            file,
            rows,
            cols,
            both,
        } => cmd_minor(&mut io, &file, &rows, &cols, both),
        Command::Verify {
            file,
            check,
            max_subset_size,
        } => cmd_verify(&mut io, &file, check, max_subset_size, hooks),
        Command::Symbolic { n, force } => cmd_symbolic(&mut io, n, force),
        Command::Dangles { file, vertex, mode } => cmd_dangles(&mut io, &file, vertex, mode),
    };
    match result {
        Ok(code) | Err(code) => code,
    }
}

fn cmd_prices(io: &mut Io<'_>, file: &str, normalize: NormalizeArg) -> Result<Exit, Exit> {
    let (g, instance) = io.load(file)?;
    let normalization = match normalize {
        NormalizeArg::Sum1 => Normalization::SumOne,
        NormalizeArg::Primitive => Normalization::PrimitiveInteger,
    };
    let prices = match market_clearing_prices(&g, normalization) {
        Ok(p) => p,
        Err(e @ (TheoremError::NotIrreducible { .. } | TheoremError::NegativeWeight { .. })) => {
            return Err(io.fail(EXIT_DOMAIN, e));
        }
        Err(e) => return Err(io.fail(EXIT_USAGE, e)),
    };
    let decimals: Vec<f64> = prices.values.iter().map(decimal).collect();
    let mut text = join(&prices.values);
    if io.decimal {
        text.push_str(&format!("\n~ {}", join(&decimals)));
    }
    let record = Record {
        check: "prices",
        instance: &instance,
        value: json!(prices.values.iter().map(ToString::to_string).collect::<Vec<_>>()),
        pass: true,
        witness: None,
        decimal: io.decimal.then(|| json!(decimals)),
    };
    io.emit(record, &text);
    Ok(EXIT_OK)
}

fn cmd_trees(io: &mut Io<'_>, file: &str, root: usize, mode: Mode) -> Result<Exit, Exit> {
    let (g, instance) = io.load(file)?;
    io.check_vertex(&g, "root", root)?;
    let trees = enumerate_arborescences(&g, root).expect("root checked");
    let instance = format!("{instance}, root {root}");
    emit_subgraphs(io, "trees", &instance, mode, trees.map(|t| (t.to_string(), t.weight(&g))));
    Ok(EXIT_OK)
}

fn cmd_dangles(io: &mut Io<'_>, file: &str, vertex: usize, mode: Mode) -> Result<Exit, Exit> {
    let (g, instance) = io.load(file)?;
    io.check_vertex(&g, "vertex", vertex)?;
    let dangles = enumerate_dangles(&g, vertex).expect("vertex checked");
    let instance = format!("{instance}, vertex {vertex}");
    emit_subgraphs(io, "dangles", &instance, mode, dangles.map(|d| (d.to_string(), d.weight(&g))));
    Ok(EXIT_OK)
}

/// Shared count / sum / list rendering for enumerated subgraphs.
fn emit_subgraphs(
    io: &mut Io<'_>,
    check: &str,
    instance: &str,
    mode: Mode,
    items: impl Iterator<Item = (String, Rational)>,
) {
    let (value, text, dec) = match mode {
        Mode::Count => {
            let count = items.count();
            (json!(count), count.to_string(), None)
        }
        Mode::Sum => {
            let total: Rational = items.map(|(_, w)| w).sum();
            let mut text = total.to_string();
            if io.decimal {
                text.push_str(&format!(" ~ {}", decimal(&total)));
            }
            (json!(total.to_string()), text, Some(json!(decimal(&total))))
        }
        Mode::List => {
            let lines: Vec<String> = items.map(|(s, _)| s).collect();
            (json!(lines), lines.join("\n"), None)
        }
    };
    let record = Record {
        check,
        instance,
        value,
        pass: true,
        witness: None,
        decimal: dec.filter(|_| io.decimal),
    };
    if mode == Mode::List && text.is_empty() && io.format == Format::Text {
        return;
    }
    io.emit(record, &text);
}

fn cmd_minor(io: &mut Io<'_>, file: &str, rows: &str, cols: &str, both: bool) -> Result<Exit, Exit> {
    let (g, instance) = io.load(file)?;
    let Some(rows) = parse_index_list(rows) else {
        return Err(io.fail(EXIT_USAGE, format!("--rows: cannot read index list `{rows}`")));
    };
    let Some(cols) = parse_index_list(cols) else {
        return Err(io.fail(EXIT_USAGE, format!("--cols: cannot read index list `{cols}`")));
    };
    let det = laplacian_minor(&g, &rows, &cols).map_err(|e| io.fail(EXIT_USAGE, e))?;
    let instance = format!("{instance}, I={rows}, J={cols}");
    if !both {
        let mut text = det.to_string();
        if io.decimal {
            text.push_str(&format!(" ~ {}", decimal(&det)));
        }
        let record = Record {
            check: "minor",
            instance: &instance,
            value: json!(det.to_string()),
            pass: true,
            witness: None,
            decimal: io.decimal.then(|| json!(decimal(&det))),
        };
        io.emit(record, &text);
        return Ok(EXIT_OK);
    }
    let sum = signed_forest_sum(&g, &rows, &cols).map_err(|e| io.fail(EXIT_USAGE, e))?;
    let pass = det == sum;
    let verdict = if pass { "MATCH" } else { "MISMATCH" };
    let record = Record {
        check: "all-minors",
        instance: &instance,
        value: json!([det.to_string(), sum.to_string()]),
        pass,
        witness: (!pass).then(|| format!("det {det} != signed forest sum {sum}")),
        decimal: io.decimal.then(|| json!([decimal(&det), decimal(&sum)])),
    };
    let mut text = format!("{det} {sum} {verdict}");
    if io.decimal {
        text.push_str(&format!(" ~ {} {}", decimal(&det), decimal(&sum)));
    }
    io.emit(record, &text);
    Ok(if pass { EXIT_OK } else { EXIT_VERIFICATION_FAILED })
}

fn run_check(g: &WeightedDigraph, check: CheckArg, max_subset_size: usize, hooks: &Hooks) -> VerificationReport {
    match check {
        CheckArg::Harmonic => {
            verify_harmonic(g, &weight_vector_enum(g)).expect("weight vector has length n")
        }
        CheckArg::MatrixTree => {
            let corrupt = hooks.corrupt_cofactor;
            verify_matrix_tree_with(g, |l, i, j| {
                let c = l.cofactor(i, j).expect("square Laplacian");
                if corrupt == Some((i, j)) {
                    -c
                } else {
                    c
                }
            })
        }
        CheckArg::AllMinors => verify_all_minors_up_to(g, max_subset_size),
        CheckArg::Dangle => verify_dangle_identities(g),
        CheckArg::All => unreachable!("expanded by caller"),
    }
}

fn cmd_verify(
    io: &mut Io<'_>,
    file: &str,
    check: CheckArg,
    max_subset_size: usize,
    hooks: &Hooks,
) -> Result<Exit, Exit> {
    let (g, _) = io.load(file)?;
    let checks = match check {
        CheckArg::All => vec![
            CheckArg::Harmonic,
            CheckArg::MatrixTree,
            CheckArg::AllMinors,
            CheckArg::Dangle,
        ],
        one => vec![one],
    };
    let mut reports: Vec<VerificationReport> = std::thread::scope(|s| {
        let handles: Vec<_> = checks
            .iter()
            .map(|&c| {
                let g = &g;
                s.spawn(move || run_check(g, c, max_subset_size, hooks))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("verification thread panicked"))
            .collect()
    });
    reports.sort_by_key(|r| r.check().name());
    for r in &reports {
        io.emit_report(r);
    }
    Ok(if reports.iter().all(VerificationReport::passed) {
        EXIT_OK
    } else {
        EXIT_VERIFICATION_FAILED
    })
}

fn cmd_symbolic(io: &mut Io<'_>, n: usize, force: bool) -> Result<Exit, Exit> {
    let report = match verify_symbolic_matrix_tree(n, force) {
        Ok(r) => r,
        Err(e @ (SymbolicError::SizeGuard { .. } | SymbolicError::TooSmall(_))) => {
            return Err(io.fail(EXIT_USAGE, format!("--n: {e}")));
        }
        Err(e) => return Err(io.fail(EXIT_USAGE, e)),
    };
    if io.format == Format::Text {
        for (j, terms) in report.terms_per_column.iter().enumerate() {
            let _ = writeln!(io.out, "column {}: {terms} terms", j + 1);
        }
        for cell in report.cells.iter().filter(|c| !c.pass) {
            let _ = writeln!(io.out, "cofactor ({},{}) FAIL ({} terms)", cell.row, cell.col, cell.terms);
        }
    }
    let summary = match report.terms_per_column.first() {
        Some(&t) if report.terms_per_column.iter().all(|&x| x == t) => {
            format!("{t} terms per column")
        }
        _ => format!("terms per column: {}", join(&report.terms_per_column)),
    };
    let record = Record {
        check: report.report.check().name(),
        instance: report.report.instance(),
        value: json!({
            "terms_per_column": report.terms_per_column,
            "unit_coefficients": report.unit_coefficients,
            "degree_n_minus_1": report.degree_n_minus_1,
        }),
        pass: report.report.passed(),
        witness: report.report.witness().map(ToString::to_string),
        decimal: None,
    };
    let text = format!("{}: {summary}", report.report);
    io.emit(record, &text);
    Ok(if report.report.passed() {
        EXIT_OK
    } else {
        EXIT_VERIFICATION_FAILED
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str], stdin: &str) -> (i32, String, String) {
        let mut input = stdin.as_bytes();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["minortree"];
        full.extend_from_slice(args);
        let code = run(full, &mut input, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    const THREE_CYCLE: &str = "n 3\n1 2 2\n2 3 3\n3 1 5\n";

    #[test]
    fn index_lists() {
        assert_eq!(parse_index_list(""), Some(IndexSet::empty()));
        assert_eq!(parse_index_list("3, 1"), Some(IndexSet::new([1, 3]).unwrap()));
        assert_eq!(parse_index_list("1,x"), None);
        assert_eq!(parse_index_list("2,2"), None);
    }

    #[test]
    fn stdin_input() {
        let (code, out, _) = run_str(&["prices", "-", "--normalize", "primitive"], THREE_CYCLE);
        assert_eq!(code, 0);
        assert_eq!(out, "6 15 10\n");
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let (code, _, err) = run_str(&["prices", "-", "--bogus"], THREE_CYCLE);
        assert_eq!(code, EXIT_USAGE);
        assert!(!err.is_empty());
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_str(&["--help"], "");
        assert_eq!(code, 0);
        assert!(out.contains("prices"));
    }

    #[test]
    fn missing_file_is_usage_error() {
        let (code, _, err) = run_str(&["trees", "/nonexistent/graph.txt", "--root", "1"], "");
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("cannot read"));
    }
}
