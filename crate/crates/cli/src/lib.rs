//! Command-line front end. `run` turns an argument list into the report text
//! and the process exit code, so it can be tested without spawning.

use std::fmt::Write as _;

use clap::{Parser, Subcommand, ValueEnum};
use handlebody::complex::Coefficients;
use handlebody::covers::{
    self, chamber_ball, classify, double_homology_capped, universal_cover_support,
    SubsetContribution,
};
use handlebody::handlebody::{BeltKind, BeltWitness, FacetClasses};
use handlebody::instances::{bundled, bundled_names, InstanceFile};
use handlebody::oracle::{self, build_double, gromov_link_check, oracle_homology};
use handlebody::words::{self, Presentation, Show};
use handlebody::{Error, HomologyResult, SimpleHandlebody};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "handlebody-report/1";

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Coeff {
    Z,
    Z2,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Space {
    Double,
    Universal,
}

#[derive(Parser, Debug)]
#[command(name = "handlebody", version, about = "Analyses of right-angled simple handlebodies")]
pub struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    #[arg(long, value_enum, default_value = "z", global = true)]
    pub coeff: Coeff,
    #[arg(long, value_enum, default_value = "double", global = true)]
    pub space: Space,
    #[arg(long, default_value_t = 2, global = true)]
    pub radius: usize,
    /// Largest number of facet classes for the oracle and the double.
    #[arg(long, default_value_t = oracle::DEFAULT_CAP_M, global = true)]
    pub cap_m: usize,
    /// Largest word length or ball radius.
    #[arg(long, default_value_t = oracle::DEFAULT_CAP_LENGTH, global = true)]
    pub cap_length: usize,
    #[command(subcommand)]
    pub command: Command,
}

/// `INSTANCE` is a JSON instance file or `@name` for a bundled instance.
#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check every structural invariant.
    Validate { instance: String },
    /// Quotient nerve on facet classes.
    Nerve { instance: String },
    /// Delta and square belt witnesses.
    Belts { instance: String },
    /// Flagness of the nerve of the cut polytope.
    Flag { instance: String },
    /// Presentation of the orbifold fundamental group.
    Group { instance: String },
    /// Normal form, cyclic reduction and descent set of a word.
    Reduce { instance: String, word: String },
    /// Whether two words are equal in the group.
    Equal { instance: String, left: String, right: String },
    /// Whether two words commute in the group.
    Commute { instance: String, left: String, right: String },
    /// Homology of the double or contribution types of the universal cover.
    Homology { instance: String },
    /// Chamber ball in the universal cover.
    Ball { instance: String },
    /// Curvature classification report.
    Classify { instance: String },
    /// Explicit double, comparison with the formula, and the link check.
    Oracle { instance: String },
    /// Bundled instances.
    Instances {
        #[command(subcommand)]
        action: InstancesAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum InstancesAction {
    List,
    /// Print a bundled instance as an instance file.
    Export { name: String },
}

struct Loaded {
    handlebody: SimpleHandlebody,
    sha256: String,
}

fn load(source: &str) -> Result<Loaded, Error> {
    let file = match source.strip_prefix('@') {
        Some(name) => InstanceFile::from_handlebody(&bundled(name)?),
        None => {
            let text = std::fs::read_to_string(source)
                .map_err(|e| Error::input(format!("cannot read {source}: {e}")))?;
            InstanceFile::from_json(&text)?
        }
    };
    let fallback = std::path::Path::new(source.trim_start_matches('@'))
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("instance")
        .to_string();
    let handlebody = file.to_handlebody(&fallback)?;
    let canonical = InstanceFile::from_handlebody(&handlebody).to_json();
    let sha256 = Sha256::digest(canonical.as_bytes())
        .iter()
        .fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        });
    Ok(Loaded { handlebody, sha256 })
}

struct Outcome {
    result: Value,
    diagnostics: Vec<String>,
    code: i32,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Outcome {
            result,
            diagnostics: Vec::new(),
            code: 0,
        }
    }

    fn from_error(e: &Error) -> Self {
        let diagnostics = match e {
            Error::InvalidInstance(v) => v.clone(),
            other => vec![other.to_string()],
        };
        Outcome {
            result: Value::Null,
            diagnostics,
            code: e.exit_code(),
        }
    }
}

fn homology_json(h: &HomologyResult) -> Value {
    json!({
        "coefficients": h.coefficients.to_string(),
        "groups": h.groups.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
    })
}

fn contribution_json(c: &SubsetContribution) -> Value {
    let mut v = json!({
        "subset": c.subset,
        "homology": c.homology.groups.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
    });
    if let Some(t) = &c.stable_letter {
        v["stable_letter"] = json!(t);
    }
    v
}

fn witness_json(h: &SimpleHandlebody, classes: &FacetClasses, w: &BeltWitness) -> Value {
    let labels = |fs: &[usize]| fs.iter().map(|&f| h.facet_label(f).to_string()).collect::<Vec<_>>();
    let mut v = json!({
        "kind": match w.kind {
            BeltKind::Delta(k) => format!("delta{k}"),
            BeltKind::Square => "square".to_string(),
        },
        "facet_classes": w.facet_classes.iter().map(|&c| classes.labels[c].clone()).collect::<Vec<_>>(),
        "facets": labels(&w.facets),
    });
    if w.kind == BeltKind::Square {
        v["crossing_belts"] = w
            .crossing_belts
            .iter()
            .map(|c| {
                json!({
                    "belt": h.belt_label(c.belt),
                    "direction": if c.forward { "plus-to-minus" } else { "minus-to-plus" },
                })
            })
            .collect();
    }
    if let Some(chain) = &w.chain {
        if !w.crossing_belts.is_empty() {
            v["chain"] = json!({
                "f1": labels(&chain.f1),
                "f2": h.facet_label(chain.f2),
                "f3": labels(&chain.f3),
                "f4": h.facet_label(chain.f4),
            });
        }
    }
    v
}

fn coefficients(c: Coeff) -> Coefficients {
    match c {
        Coeff::Z => Coefficients::Z,
        Coeff::Z2 => Coefficients::Z2,
    }
}

fn execute(cli: &Cli, h: &SimpleHandlebody) -> Result<Outcome, Error> {
    if !matches!(cli.command, Command::Validate { .. }) {
        h.require_valid()?;
    }
    let words = |p: &Presentation, text: &str| p.parse_word(text);
    Ok(match &cli.command {
        Command::Validate { .. } => {
            let report = h.validate();
            let valid = report.is_valid();
            Outcome {
                result: json!({ "valid": valid, "violations": report.violations }),
                diagnostics: report
                    .violations
                    .iter()
                    .map(|v| format!("{}: {}", v.invariant, v.detail))
                    .collect(),
                code: if valid { 0 } else { 1 },
            }
        }
        Command::Nerve { .. } => {
            let q = h.quotient_nerve()?;
            Outcome::ok(json!({
                "vertices": q.labels(),
                "maximal_simplices": q.maximal_simplex_labels(),
                "face_counts": q.face_counts(),
                "euler_characteristic": q.euler_characteristic(),
            }))
        }
        Command::Belts { .. } => {
            let classes = h.facet_classes()?;
            let delta: Vec<Value> = h.delta_belts()?.iter().map(|w| witness_json(h, &classes, w)).collect();
            let (squares, diagnostics) = if h.is_flag() {
                let s: Vec<Value> = h.square_belts()?.iter().map(|w| witness_json(h, &classes, w)).collect();
                (json!(s), Vec::new())
            } else {
                (Value::Null, vec!["square belts are only defined for flag instances".to_string()])
            };
            Outcome {
                result: json!({ "delta_belts": delta, "square_belts": squares }),
                diagnostics,
                code: 0,
            }
        }
        Command::Flag { .. } => {
            let empty: Vec<Vec<String>> = h
                .nerve()
                .empty_simplices()
                .iter()
                .map(|s| s.iter().map(|&f| h.facet_label(f).to_string()).collect())
                .collect();
            Outcome::ok(json!({ "flag": h.is_flag(), "empty_simplices": empty }))
        }
        Command::Group { .. } => {
            let p = Presentation::new(h)?;
            let letter = |f: usize| p.format_letter(words::Letter::S(f));
            let tables: Vec<Value> = (0..p.belt_count())
                .map(|b| {
                    json!({
                        "stable_letter": p.format_letter(words::Letter::t(b)),
                        "conjugation": p.conjugation_table(b).iter()
                            .map(|(&f, &g)| vec![letter(f), letter(g)])
                            .collect::<Vec<_>>(),
                    })
                })
                .collect();
            let relators: Vec<String> = p.relators().iter().map(|r| p.format_word(r)).collect();
            Outcome::ok(json!({
                "involutive_generators": p.involutive_generators().iter().map(|&f| letter(f)).collect::<Vec<_>>(),
                "free_generators": (0..p.belt_count()).map(|b| p.format_letter(words::Letter::t(b))).collect::<Vec<_>>(),
                "commutation_edges": p.commutation_edges().iter().map(|&(a, b)| vec![letter(a), letter(b)]).collect::<Vec<_>>(),
                "conjugation_tables": tables,
                "relators": relators,
            }))
        }
        Command::Reduce { word, .. } => {
            let p = Presentation::new(h)?;
            let w = words(&p, word)?;
            let nf = p.hnn_normal_form(&w);
            let normal = nf.to_word();
            let cyclic = p.cyclic_reduce(&w);
            Outcome::ok(json!({
                "input": p.format_word(&w),
                "normal_form": p.format_word(&normal),
                "length": nf.length(),
                "t_length": nf.t_length(),
                "identity": nf.is_identity(),
                "cyclic_reduction": p.format_word(&cyclic),
                "torsion": p.torsion_status(&w),
                "descent_set": p.descent_set(&w).iter().map(|&x| p.format_letter(x)).collect::<Vec<_>>(),
            }))
        }
        Command::Equal { left, right, .. } | Command::Commute { left, right, .. } => {
            let p = Presentation::new(h)?;
            let (u, v) = (words(&p, left)?, words(&p, right)?);
            let (key, value) = match cli.command {
                Command::Equal { .. } => ("equal", p.equal(&u, &v)),
                _ => ("commute", p.commutes(&u, &v)),
            };
            Outcome::ok(json!({
                "left": Show(&p, &u).to_string(),
                "right": Show(&p, &v).to_string(),
                key: value,
            }))
        }
        Command::Homology { .. } => match cli.space {
            Space::Double => {
                let d = double_homology_capped(h, coefficients(cli.coeff), cli.cap_m)?;
                Outcome::ok(json!({
                    "space": "double",
                    "total": homology_json(&d.total),
                    "contributions": d.contributions.iter().map(contribution_json).collect::<Vec<_>>(),
                }))
            }
            Space::Universal => {
                let support = universal_cover_support(h)?;
                let nonzero: Vec<Value> = support
                    .iter()
                    .filter(|c| !c.homology.is_zero())
                    .map(contribution_json)
                    .collect();
                Outcome::ok(json!({
                    "space": "universal",
                    "admissible_sets": support.len(),
                    "nonzero_contributions": nonzero,
                    "aspherical": covers::is_aspherical(h)?,
                }))
            }
        },
        Command::Ball { .. } => {
            if cli.radius > cli.cap_length {
                return Err(Error::ResourceCap {
                    what: "ball radius".into(),
                    actual: cli.radius,
                    cap: cli.cap_length,
                });
            }
            let ball = chamber_ball(h, cli.radius, covers::DEFAULT_CHAMBER_CAP)?;
            let p = Presentation::new(h)?;
            Outcome::ok(json!({
                "radius": ball.radius,
                "counts": ball.counts,
                "closed": ball.closed,
                "interior_checked": ball.interior_checked,
                "links_match_nerve": ball.link_failures.is_empty(),
                "link_failures": ball.link_failures.iter().map(|&c| Show(&p, &ball.chambers[c]).to_string()).collect::<Vec<_>>(),
                "chambers": ball.chambers.iter().map(|w| Show(&p, w).to_string()).collect::<Vec<_>>(),
            }))
        }
        Command::Classify { .. } => {
            let report = classify(h)?;
            let mut v = serde_json::to_value(&report).expect("report serializes");
            if report.has_z2 == Some(true) {
                let p = Presentation::new(h)?;
                if let Some((x, y)) = words::z2_witness(h, &p)? {
                    v["z2_witness"] = json!([p.format_word(&x), p.format_word(&y)]);
                }
            }
            Outcome::ok(v)
        }
        Command::Oracle { .. } => oracle_outcome(cli, h)?,
        Command::Instances { .. } => unreachable!("handled before loading"),
    })
}

fn oracle_outcome(cli: &Cli, h: &SimpleHandlebody) -> Result<Outcome, Error> {
    let double = build_double(h, cli.cap_m)?;
    let coeff = coefficients(cli.coeff);
    let oracle = oracle_homology(&double, coeff);
    let mut diagnostics = Vec::new();
    let formula = match double_homology_capped(h, coeff, cli.cap_m) {
        Ok(d) => Some(d.total.trimmed()),
        Err(Error::Unsupported(msg)) => {
            diagnostics.push(format!("formula side unsupported: {msg}"));
            None
        }
        Err(e) => return Err(e),
    };
    let gromov = gromov_link_check(h, cli.cap_m)?;
    let agree = formula.as_ref().map(|f| *f == oracle);
    let npc_matches = gromov.npc == h.is_flag();
    let mut code = 0;
    if agree == Some(false) {
        diagnostics.push("formula and oracle disagree".into());
        code = 4;
    }
    if !npc_matches {
        diagnostics.push("link condition verdict differs from flagness".into());
        code = 4;
    }
    let h1 = oracle.degree(1);
    let verdict = match agree {
        Some(true) => format!("formula == oracle: PASS, H1 rank {}", h1.free_rank),
        Some(false) => "formula == oracle: FAIL".to_string(),
        None => "formula == oracle: SKIPPED".to_string(),
    };
    Ok(Outcome {
        result: json!({
            "verdict": verdict,
            "chambers": double.chambers,
            "top_simplices": double.complex.maximal_simplices().len(),
            "oracle": homology_json(&oracle),
            "formula": formula.as_ref().map(homology_json),
            "gromov": gromov,
            "npc_matches_flag": npc_matches,
        }),
        diagnostics,
        code,
    })
}

fn render_text(out: &mut String, prefix: &str, v: &Value) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                render_text(out, &key, x);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
            if items.is_empty() {
                let _ = writeln!(out, "{prefix}: []");
            }
            for (i, x) in items.iter().enumerate() {
                render_text(out, &format!("{prefix}[{i}]"), x);
            }
        }
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            let _ = writeln!(out, "{prefix}: [{}]", parts.join(", "));
        }
        other => {
            let _ = writeln!(out, "{prefix}: {}", scalar(other));
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Nerve { .. } => "nerve",
        Command::Belts { .. } => "belts",
        Command::Flag { .. } => "flag",
        Command::Group { .. } => "group",
        Command::Reduce { .. } => "reduce",
        Command::Equal { .. } => "equal",
        Command::Commute { .. } => "commute",
        Command::Homology { .. } => "homology",
        Command::Ball { .. } => "ball",
        Command::Classify { .. } => "classify",
        Command::Oracle { .. } => "oracle",
        Command::Instances { .. } => "instances",
    }
}

fn instance_arg(c: &Command) -> Option<&str> {
    match c {
        Command::Validate { instance }
        | Command::Nerve { instance }
        | Command::Belts { instance }
        | Command::Flag { instance }
        | Command::Group { instance }
        | Command::Reduce { instance, .. }
        | Command::Equal { instance, .. }
        | Command::Commute { instance, .. }
        | Command::Homology { instance }
        | Command::Ball { instance }
        | Command::Classify { instance }
        | Command::Oracle { instance } => Some(instance),
        Command::Instances { .. } => None,
    }
}

/// Parses `args` (including the program name) and produces the output text
/// and exit code.
pub fn run<I, T>(args: I) -> (String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            return (e.render().to_string(), code);
        }
    };
    if let Command::Instances { action } = &cli.command {
        return match action {
            InstancesAction::List => {
                let names = bundled_names();
                match cli.format {
                    Format::Json => (format!("{}\n", json!(names)), 0),
                    Format::Text => (names.iter().map(|n| format!("{n}\n")).collect(), 0),
                }
            }
            InstancesAction::Export { name } => match bundled(name) {
                Ok(h) => (format!("{}\n", InstanceFile::from_handlebody(&h).to_json()), 0),
                Err(e) => (format!("error: {e}\n"), e.exit_code()),
            },
        };
    }

    let source = instance_arg(&cli.command).expect("instance argument");
    let (name, hash, outcome) = match load(source) {
        Err(e) => (Value::Null, Value::Null, Outcome::from_error(&e)),
        Ok(loaded) => {
            let outcome = execute(&cli, &loaded.handlebody).unwrap_or_else(|e| Outcome::from_error(&e));
            (json!(loaded.handlebody.name), json!(loaded.sha256), outcome)
        }
    };
    let report = json!({
        "schema": SCHEMA,
        "command": command_name(&cli.command),
        "instance": { "name": name, "sha256": hash },
        "exit_code": outcome.code,
        "result": outcome.result,
        "diagnostics": outcome.diagnostics,
    });
    let text = match cli.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&report).expect("json")),
        Format::Text => {
            let mut out = String::new();
            render_text(&mut out, "", &report);
            out
        }
    };
    (text, outcome.code)
}
