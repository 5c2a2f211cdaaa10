//! `mlschur`: command-line front end. Every subcommand prints one JSON
//! report `{command, inputs, invariants, witnesses?, timing}` on stdout.

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use mlschur::cohomology;
use mlschur::exterior;
use mlschur::group::{self, FiniteGroup};
use mlschur::liesq;
use mlschur::mla::{self, StarTable, DEFAULT_BUDGET, ORBIT_LIMIT};
use mlschur::presentation::DEFAULT_MAX_COSETS;
use mlschur::verify::{self, VerifyOptions};

#[derive(Parser)]
#[command(name = "mlschur", version, about = "Schur multipliers of finite multiplicative Lie algebras")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Common {
    /// Coset budget for Todd–Coxeter.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_COSETS)]
    max_cosets: usize,
    /// Candidate budget for structure enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Include witnesses (tables, generators) in the report.
    #[arg(long, global = true)]
    witness: bool,
    /// Record wall-clock seconds in the report.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build or inspect groups.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Multiplicative Lie algebra structures.
    #[command(subcommand)]
    Mla(MlaCmd),
    /// Non-abelian exterior squares.
    #[command(subcommand)]
    Ext(ExtCmd),
    /// Lie exterior square of a structure (|K| ≤ 8).
    Liesq(GroupStar),
    /// Second cohomology with coefficients in ℤ/m.
    #[command(subcommand)]
    Cohom(CohomCmd),
    /// Schur multiplier M(K) from the exterior square.
    Schur(GroupArg),
    /// M̃(K) through the coefficient tower.
    SchurMl(GroupStar),
    /// Table verification harness.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Args)]
struct GroupArg {
    /// Z<n>, V4, D<n>, Q<n>, SL(2,3), M(m,n,a), `G x H`, file:<path>, pres:<text>
    #[arg(long, short)]
    group: String,
}

#[derive(Args)]
struct GroupStar {
    #[arg(long, short)]
    group: String,
    /// trivial, improper, `a*b=b^2; ...`, or file:<path>
    #[arg(long, short)]
    star: String,
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Write the Cayley table in the group file format.
    Build {
        #[arg(long, short)]
        group: String,
        #[arg(long, short)]
        output: Option<String>,
    },
    /// Order, exponent, order statistics and abelian invariants.
    Print(GroupArg),
}

#[derive(Subcommand)]
enum MlaCmd {
    /// Check the five axioms and the derived identities.
    Check(GroupStar),
    /// Enumerate all structures (|G| ≤ 16).
    Enumerate(GroupArg),
    /// Classify a structure, or decide Lie simplicity without `--star`.
    Classify {
        #[arg(long, short)]
        group: String,
        #[arg(long, short)]
        star: Option<String>,
    },
}

#[derive(Subcommand)]
enum ExtCmd {
    Square(GroupArg),
    /// The subgroup J of Jacobi elements and Hom(∧²K/J, ℂ*).
    Jsub(GroupStar),
}

#[derive(Subcommand)]
enum CohomCmd {
    H2 {
        #[arg(long, short)]
        group: String,
        #[arg(short = 'm', long = "modulus")]
        modulus: u64,
    },
    H2ml {
        #[arg(long, short)]
        group: String,
        #[arg(long, short)]
        star: String,
        #[arg(short = 'm', long = "modulus")]
        modulus: u64,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    Table {
        /// `builtin` or a path to a JSON manifest.
        #[arg(long, default_value = "builtin")]
        manifest: String,
    },
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(String),
    Compute(String),
}

struct Outcome {
    command: &'static str,
    inputs: Value,
    invariants: Value,
    witnesses: Option<Value>,
    ok: bool,
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn compute(e: impl std::fmt::Display) -> Failure {
    Failure::Compute(e.to_string())
}

fn load_group(spec: &str, c: &Common) -> Result<FiniteGroup, Failure> {
    verify::parse_group_spec(spec, c.max_cosets).map_err(usage)
}

fn load_star(spec: &str, g: &FiniteGroup) -> Result<StarTable, Failure> {
    if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path.trim()).map_err(|e| usage(format!("{path}: {e}")))?;
        return mla::parse_star_file(&text, g).map_err(usage);
    }
    mla::parse_star_spec(spec, g).map_err(|e| match e {
        mla::MlaError::Parse(_) | mla::MlaError::NotAGenerator(_) => usage(e),
        other => compute(other),
    })
}

fn star_json(s: &StarTable) -> Value {
    let n = s.order();
    Value::from(s.table().chunks(n).map(|r| r.to_vec()).collect::<Vec<_>>())
}

fn run(cmd: &Command, c: &Common) -> Result<Outcome, Failure> {
    Ok(match cmd {
        Command::Group(GroupCmd::Build { group: spec, output }) => {
            let g = load_group(spec, c)?;
            let text = group::format_group_file(&g);
            let mut invariants = json!({ "order": g.order() });
            if let Some(path) = output {
                std::fs::write(path, &text).map_err(|e| compute(format!("{path}: {e}")))?;
            } else {
                invariants["file"] = Value::from(text);
            }
            Outcome { command: "group build", inputs: json!({ "group": spec, "output": output }), invariants, witnesses: None, ok: true }
        }
        Command::Group(GroupCmd::Print(GroupArg { group: spec })) => {
            let g = load_group(spec, c)?;
            let ab = group::abelian_invariants(&g).ok();
            let (q, _) = group::abelianization(&g);
            let invariants = json!({
                "label": g.label(),
                "fingerprint": g.fingerprint(),
                "abelian_invariants": ab,
                "abelianization": group::abelian_invariants(&q).map_err(compute)?,
                "commutator_subgroup_order": group::commutator_subgroup(&g).order(),
                "center_order": group::center(&g).order(),
                "generators": g.generators().iter().map(|(n, e)| json!([n, e])).collect::<Vec<_>>(),
            });
            let witnesses = c.witness.then(|| json!({ "elements": g.element_names(), "table": group::format_group_file(&g) }));
            Outcome { command: "group print", inputs: json!({ "group": spec }), invariants, witnesses, ok: true }
        }
        Command::Mla(MlaCmd::Check(GroupStar { group: gs, star: ss })) => {
            let g = load_group(gs, c)?;
            let s = load_star(ss, &g)?;
            let axioms = mla::check_star_axioms(&g, &s);
            let derived = mla::check_derived_identities(&g, &s);
            let ok = axioms.is_ok() && derived.is_ok();
            let invariants = json!({
                "pass": ok,
                "classification": mla::classify_star(&g, &s),
                "axiom_violation": axioms.err(),
                "derived_violation": derived.err(),
            });
            let witnesses = c.witness.then(|| json!({ "star": star_json(&s) }));
            Outcome { command: "mla check", inputs: json!({ "group": gs, "star": ss }), invariants, witnesses, ok }
        }
        Command::Mla(MlaCmd::Enumerate(GroupArg { group: gs })) => {
            let g = load_group(gs, c)?;
            let all = mla::enumerate_stars(&g, c.budget).map_err(compute)?;
            let count = |k: mla::Classification| all.iter().filter(|s| s.classification == k).count();
            let tables: Vec<StarTable> = all.iter().map(|s| s.star.clone()).collect();
            let orbits = if g.order() <= ORBIT_LIMIT { Some(mla::orbit_count(&g, &tables).map_err(compute)?) } else { None };
            let invariants = json!({
                "structures": all.len(),
                "trivial": count(mla::Classification::Trivial),
                "improper": count(mla::Classification::Improper),
                "proper": count(mla::Classification::Proper),
                "automorphism_orbits": orbits,
            });
            let witnesses = c.witness.then(|| {
                Value::from(
                    all.iter()
                        .map(|s| json!({ "classification": s.classification, "star": star_json(&s.star) }))
                        .collect::<Vec<_>>(),
                )
            });
            Outcome { command: "mla enumerate", inputs: json!({ "group": gs, "budget": c.budget }), invariants, witnesses, ok: true }
        }
        Command::Mla(MlaCmd::Classify { group: gs, star: Some(ss) }) => {
            let g = load_group(gs, c)?;
            let s = load_star(ss, &g)?;
            let valid = mla::check_star_axioms(&g, &s).is_ok();
            let invariants = json!({ "valid": valid, "classification": mla::classify_star(&g, &s) });
            Outcome { command: "mla classify", inputs: json!({ "group": gs, "star": ss }), invariants, witnesses: None, ok: valid }
        }
        Command::Mla(MlaCmd::Classify { group: gs, star: None }) => {
            let g = load_group(gs, c)?;
            let l = mla::lie_simplicity(&g, c.budget, c.max_cosets).map_err(compute)?;
            let invariants = json!({ "lie_simple": l.simple, "method": l.method, "structures_found": l.structures_found });
            let witnesses = c.witness.then(|| json!({ "proper_witness": l.proper_witness.as_ref().map(star_json) }));
            Outcome { command: "mla classify", inputs: json!({ "group": gs, "budget": c.budget }), invariants, witnesses, ok: true }
        }
        Command::Ext(ExtCmd::Square(GroupArg { group: gs })) => {
            let g = load_group(gs, c)?;
            let e = exterior::exterior_square(&g, c.max_cosets).map_err(compute)?;
            let invariants = json!({
                "order": e.order(),
                "shape": verify::square_shape(&e),
                "schur_multiplier": e.schur_multiplier().map_err(compute)?,
            });
            let witnesses = c.witness.then(|| {
                let n = g.order();
                json!({
                    "wedge": (0..n).map(|x| (0..n).map(|y| e.wedge(x, y)).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    "chi": e.chi().images(),
                })
            });
            Outcome { command: "ext square", inputs: json!({ "group": gs }), invariants, witnesses, ok: true }
        }
        Command::Ext(ExtCmd::Jsub(GroupStar { group: gs, star: ss })) => {
            let g = load_group(gs, c)?;
            let s = load_star(ss, &g)?;
            let e = exterior::exterior_square(&g, c.max_cosets).map_err(compute)?;
            let j = exterior::j_subgroup(&e, &s);
            let invariants = json!({
                "j_order": j.generated.order(),
                "normal_closure_order": j.normal_closure.order(),
                "is_normal": j.is_normal,
                "hom_quotient_to_cstar": exterior::mod_j_dual_invariants(&e, &s).map_err(compute)?,
            });
            let witnesses = c.witness.then(|| json!({ "j_generators": j.generated.generators() }));
            Outcome { command: "ext jsub", inputs: json!({ "group": gs, "star": ss }), invariants, witnesses, ok: true }
        }
        Command::Liesq(GroupStar { group: gs, star: ss }) => {
            let g = load_group(gs, c)?;
            let s = load_star(ss, &g)?;
            let l = liesq::lie_exterior_square(&g, &s, c.max_cosets).map_err(compute)?;
            let tilde = cohomology::tilde_schur(&g, &s).map_err(compute)?;
            let exact = liesq::verify_sequence3(&l, &tilde);
            let invariants = json!({
                "order": l.order(),
                "invariants": l.group_invariants(),
                "kernel": l.kernel_invariants(),
                "tilde_star_trivial": l.tilde_star.table().iter().all(|&v| v == l.group_part.identity()),
                "tilde_schur": tilde,
                "sequence_exact": exact,
            });
            let witnesses = c.witness.then(|| json!({ "tilde_star": star_json(&l.tilde_star) }));
            Outcome { command: "liesq", inputs: json!({ "group": gs, "star": ss }), invariants, witnesses, ok: true }
        }
        Command::Cohom(CohomCmd::H2 { group: gs, modulus }) => {
            let g = load_group(gs, c)?;
            let h = cohomology::h2_group(&g, *modulus).map_err(compute)?;
            let witnesses = c.witness.then(|| serde_json::to_value(&h.generators).unwrap_or(Value::Null));
            Outcome {
                command: "cohom h2",
                inputs: json!({ "group": gs, "modulus": modulus }),
                invariants: json!({ "h2": h.invariants }),
                witnesses,
                ok: true,
            }
        }
        Command::Cohom(CohomCmd::H2ml { group: gs, star: ss, modulus }) => {
            let g = load_group(gs, c)?;
            let s = load_star(ss, &g)?;
            let h = cohomology::h2ml_group(&g, &s, *modulus).map_err(compute)?;
            let witnesses = c.witness.then(|| serde_json::to_value(&h.generators).unwrap_or(Value::Null));
            Outcome {
                command: "cohom h2ml",
                inputs: json!({ "group": gs, "star": ss, "modulus": modulus }),
                invariants: json!({ "h2ml": h.invariants }),
                witnesses,
                ok: true,
            }
        }
        Command::Schur(GroupArg { group: gs }) => {
            let g = load_group(gs, c)?;
            let m = exterior::schur_multiplier(&g, c.max_cosets).map_err(compute)?;
            Outcome { command: "schur", inputs: json!({ "group": gs }), invariants: json!({ "schur": m }), witnesses: None, ok: true }
        }
        Command::SchurMl(GroupStar { group: gs, star: ss }) => {
            let g = load_group(gs, c)?;
            let s = load_star(ss, &g)?;
            let cx = cohomology::Complex::ml(&g, &s).map_err(compute)?;
            let t = cohomology::tilde_schur_tower(&cx, g.order() as u64).map_err(compute)?;
            let witnesses = c.witness.then(|| json!({ "tower_base": t.base, "tower_images": t.images }));
            Outcome {
                command: "schur-ml",
                inputs: json!({ "group": gs, "star": ss }),
                invariants: json!({ "tilde_schur": t.stable }),
                witnesses,
                ok: true,
            }
        }
        Command::Verify(VerifyCmd::Table { manifest }) => {
            let entries = if manifest == "builtin" {
                verify::builtin_manifest()
            } else {
                let text = std::fs::read_to_string(manifest).map_err(|e| usage(format!("{manifest}: {e}")))?;
                verify::parse_manifest(&text).map_err(usage)?
            };
            let opts = VerifyOptions { max_cosets: c.max_cosets, budget: c.budget };
            let (rows, code) = verify::run_table_verification(&entries, opts);
            let tally = |f: fn(&verify::VerificationRow) -> bool| rows.iter().filter(|r| f(r)).count();
            let invariants = json!({
                "rows": rows,
                "passed": tally(verify::VerificationRow::passed),
                "failed": tally(verify::VerificationRow::failed),
                "skipped": rows.len() - tally(verify::VerificationRow::passed) - tally(verify::VerificationRow::failed),
            });
            Outcome { command: "verify table", inputs: json!({ "manifest": manifest }), invariants, witnesses: None, ok: code == 0 }
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli.command, &cli.common) {
        Ok(out) => {
            let mut report = json!({
                "command": out.command,
                "inputs": out.inputs,
                "invariants": out.invariants,
                "timing": cli.common.timing.then(|| start.elapsed().as_secs_f64()),
            });
            if let Some(w) = out.witnesses {
                report["witnesses"] = w;
            }
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
