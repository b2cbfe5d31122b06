use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use metaprops::arith_r::sigma1_prove;
use metaprops::atlas::{self, PropertyId, RosserPair};
use metaprops::logic::Formula;
use metaprops::machine::programs;
use metaprops::reductions::theory_to_set_tt;
use metaprops::resets::{canonical_ei_pair, check_ei_exclusion, creative_demo, ReSet};
use metaprops::theories::{
    derived_theory, scan_pattern, succ_decide, succ_theory, weak_rep_scan, BooleanCombo, Family,
};

#[derive(Parser)]
#[command(name = "metaprops", version, about = "Workbench for RE theories, Rosser separation and the property atlas")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Creative and effectively inseparable sets.
    Resets {
        #[command(subcommand)]
        cmd: ResetsCmd,
    },
    /// Checked certificates in R.
    Certify {
        #[command(subcommand)]
        cmd: CertifyCmd,
    },
    /// Rosser separators for disjoint RE pairs.
    Rosser {
        #[command(subcommand)]
        cmd: RosserCmd,
    },
    /// Decision procedures.
    Decide {
        #[command(subcommand)]
        cmd: DecideCmd,
    },
    /// Scans over numerals.
    Scan {
        #[command(subcommand)]
        cmd: ScanCmd,
    },
    /// The truth-table condition for a Boolean combination of the A_n.
    Ttreduce { combo: String },
    /// The implication matrix between the twelve properties.
    Atlas {
        #[command(subcommand)]
        cmd: AtlasCmd,
    },
}

#[derive(Subcommand)]
enum ResetsCmd {
    /// Indices with W_i inside the complement of K, and the productive function on them.
    KDemo {
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 100)]
        bound: u64,
        #[arg(long, default_value_t = 100_000)]
        stage: u64,
    },
    /// The diagonal witness escaping the canonical pair.
    EiDemo {
        #[arg(long, default_value_t = 100_000)]
        stage: u64,
        /// Use the pair in the opposite order.
        #[arg(long)]
        swap: bool,
    },
}

#[derive(Subcommand)]
enum CertifyCmd {
    /// A Σ₁ sentence, with witnesses searched up to the budget.
    Sigma1 {
        sentence: String,
        #[arg(long, default_value_t = 100)]
        budget: u64,
    },
}

#[derive(Subcommand)]
enum RosserCmd {
    Demo {
        /// evens-odds or residue3
        #[arg(long, default_value = "evens-odds")]
        pair: RosserPair,
        #[arg(long, default_value_t = 20)]
        n: u64,
        #[arg(long, default_value_t = 80)]
        budget: u64,
        /// Print the full report with certificates.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum DecideCmd {
    /// A sentence of Succ.
    Succ { sentence: String },
    /// A Boolean combination of the A_n in the derived J theory with finite parameter sets.
    J {
        combo: String,
        #[arg(long, value_delimiter = ',', default_values_t = Vec::<u64>::new())]
        b_set: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_values_t = Vec::<u64>::new())]
        c_set: Vec<u64>,
        #[arg(long, default_value_t = 1000)]
        stage: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScanTheory {
    Succ,
}

#[derive(Subcommand)]
enum ScanCmd {
    /// The numerals n with T ⊢ φ(n̄).
    Weakrep {
        #[arg(long, value_enum, default_value = "succ")]
        theory: ScanTheory,
        #[arg(long)]
        formula: String,
        #[arg(long, default_value_t = 200)]
        n: u64,
    },
}

#[derive(Subcommand)]
enum AtlasCmd {
    Query {
        p: PropertyId,
        q: PropertyId,
        #[arg(long)]
        json: bool,
    },
    Dot {
        #[arg(long)]
        focus: Option<PropertyId>,
    },
    Demos,
    Run {
        demo: String,
        #[arg(long)]
        budget: Option<u64>,
    },
}

// A closed pipe ends the output quietly.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! outln {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

fn print(v: &Value) {
    outln!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn parse_formula(s: &str) -> Result<Formula, String> {
    s.parse::<Formula>().map_err(|e| format!("cannot parse formula: {e}"))
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.cmd {
        Cmd::Resets { cmd: ResetsCmd::KDemo { count, bound, stage } } => {
            let rows = creative_demo(count, bound, stage);
            let ok = rows.iter().all(|r| r.holds());
            print(&json!({"passed": ok, "stage": stage, "rows": rows}));
            Ok(ok)
        }
        Cmd::Resets { cmd: ResetsCmd::EiDemo { stage, swap } } => {
            let p = canonical_ei_pair();
            let p = if swap { p.swapped() } else { p };
            let r = check_ei_exclusion(&p.left.index, &p.right.index, &[10, 1_000, stage], 100);
            let ok = r.valid && r.excluded;
            print(&json!(r));
            Ok(ok)
        }
        Cmd::Certify { cmd: CertifyCmd::Sigma1 { sentence, budget } } => {
            let phi = parse_formula(&sentence)?;
            match sigma1_prove(&phi, budget).map_err(|e| e.to_string())? {
                Some(c) => {
                    outln!("{}", c.to_json());
                    Ok(true)
                }
                None => {
                    print(&json!({"certificate": null, "budget": budget}));
                    Ok(false)
                }
            }
        }
        Cmd::Rosser { cmd: RosserCmd::Demo { pair, n, budget, json } } => {
            let r = atlas::rosser_table(pair, n, budget);
            if json {
                print(&json!(r));
            } else {
                outln!("separator: {}", r.separator);
                for row in &r.rows {
                    let side = match (row.in_left, row.in_right) {
                        (true, _) => "left",
                        (_, true) => "right",
                        _ => "neither",
                    };
                    let cert = match (&row.proof, &row.refutation) {
                        (Some(_), None) => "proves psi(n)",
                        (None, Some(_)) => "refutes psi(n)",
                        (None, None) => "no certificate",
                        (Some(_), Some(_)) => "both",
                    };
                    outln!("{:>4}  {side:<7}  {cert}{}", row.n, if row.accepted { "" } else { "  REJECTED" });
                }
                outln!("{}", if r.passed { "pass" } else { "fail" });
            }
            Ok(r.passed)
        }
        Cmd::Decide { cmd: DecideCmd::Succ { sentence } } => {
            let v = succ_decide(&parse_formula(&sentence)?).map_err(|e| e.to_string())?;
            print(&json!({"verdict": v}));
            Ok(true)
        }
        Cmd::Decide { cmd: DecideCmd::J { combo, b_set, c_set, stage } } => {
            let c: BooleanCombo = combo.parse().map_err(|e| format!("cannot parse combination: {e}"))?;
            let t = derived_theory(
                ReSet::of(&programs::finite_set(&b_set)),
                ReSet::of(&programs::finite_set(&c_set)),
                Family::JaniczakA,
            );
            let v = t.derived_decide(&c, stage).map_err(|e| e.to_string())?;
            print(&json!({"verdict": v, "stage": stage}));
            Ok(true)
        }
        Cmd::Scan { cmd: ScanCmd::Weakrep { theory: ScanTheory::Succ, formula, n } } => {
            let phi = parse_formula(&formula)?;
            let scan = weak_rep_scan(&succ_theory(), &phi, n, 0).map_err(|e| e.to_string())?;
            print(&json!({"members": scan, "pattern": scan_pattern(&scan, n)}));
            Ok(true)
        }
        Cmd::Ttreduce { combo } => {
            let c: BooleanCombo = combo.parse().map_err(|e| format!("cannot parse combination: {e}"))?;
            let cond = theory_to_set_tt(&c);
            print(&json!({"condition": cond.to_string(), "queries": cond.queries.iter().map(|q| q.to_string()).collect::<Vec<_>>(), "alpha": cond.alpha}));
            Ok(true)
        }
        Cmd::Atlas { cmd: AtlasCmd::Query { p, q, json } } => {
            let e = atlas::query(p, q).map_err(|e| e.to_string())?;
            if json {
                print(&json!(e));
            } else {
                let status = serde_json::to_value(e.status).expect("json");
                outln!("{} -> {}: {} ({})", e.from, e.to, status.as_str().expect("string"), e.citation);
            }
            Ok(true)
        }
        Cmd::Atlas { cmd: AtlasCmd::Dot { focus } } => {
            out!("{}", atlas::export_dot(focus));
            Ok(true)
        }
        Cmd::Atlas { cmd: AtlasCmd::Demos } => {
            for d in atlas::DEMOS {
                outln!("{d}");
            }
            Ok(true)
        }
        Cmd::Atlas { cmd: AtlasCmd::Run { demo, budget } } => {
            let r = atlas::run_demo(&demo, budget).map_err(|e| e.to_string())?;
            print(&json!(r));
            Ok(r.passed)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
