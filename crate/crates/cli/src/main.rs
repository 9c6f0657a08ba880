//! `phimod`: checks on rank-3 filtered φ-modules read from JSON instance
//! files. Output is JSON with sorted keys on stdout. Exit codes: 0 ok,
//! 1 invalid input or usage, 2 a checked property fails.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use phimod_core::coeff::format_scalar;
use phimod_core::generate::{generate_module_with, stream};
use phimod_core::instance::{parse_entries, ScalarText};
use phimod_core::isomorphism::permutation_name;
use phimod_core::tauvec::{TauMatrix, TauVector};
use phimod_core::{
    admissible_positions, are_isomorphic, build_monodromy, check_weak_admissibility_with, normalize, oracle_isomorphic,
    oracle_weak_admissibility, selftest, validate_monodromy, validate_witness, ClosedFormVariant, GeneratorConfig,
    InstanceDocument, NormalFormError, Target,
};

#[derive(Parser)]
#[command(name = "phimod", version, about = "Weak admissibility, isomorphism, monodromy and normal forms for rank-3 filtered phi-modules")]
struct Cli {
    /// Compact JSON output (the default).
    #[arg(long, global = true, conflicts_with = "pretty")]
    json: bool,
    /// Indented JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Instance JSON file.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Corrected,
    LiteralD0,
}

impl From<Variant> for ClosedFormVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Corrected => ClosedFormVariant::Corrected,
            Variant::LiteralD0 => ClosedFormVariant::LiteralD0,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Any,
    Admissible,
    Irreducible,
}

impl From<TargetArg> for Target {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::Any => Target::Any,
            TargetArg::Admissible => Target::Admissible,
            TargetArg::Irreducible => Target::Irreducible,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse an instance and check every construction invariant.
    Validate(Input),
    /// Weak admissibility report from the closed-form inequalities.
    CheckWa {
        #[command(flatten)]
        input: Input,
        /// Also run the definitional oracle; a mismatch exits with 2.
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_enum, default_value = "corrected")]
        variant: Variant,
    },
    /// Decide whether two modules are isomorphic.
    Iso {
        #[arg(long, value_name = "FILE")]
        left: PathBuf,
        #[arg(long, value_name = "FILE")]
        right: PathBuf,
        /// Include and independently validate a witness.
        #[arg(long)]
        witness: bool,
        /// Also run the linear-algebra oracle; disagreement exits with 2.
        #[arg(long)]
        oracle: bool,
    },
    /// Reduce the `raw_filtration` section to normal form.
    Normalize(Input),
    /// Build and validate a monodromy operator, or list eligible positions.
    Monodromy {
        #[command(flatten)]
        input: Input,
        /// Entries as JSON, e.g. '{"12":"2","23":"1/3"}'. Defaults to the
        /// instance's `monodromy` section.
        #[arg(long, conflicts_with = "positions")]
        entries: Option<String>,
        /// Only list the eligible positions.
        #[arg(long)]
        positions: bool,
    },
    /// Seeded random instances.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of instances; more than one prints an array.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 1)]
        f_min: usize,
        #[arg(long, default_value_t = 4)]
        f_max: usize,
        #[arg(long, default_value_t = 6)]
        weight_max: u32,
        #[arg(long, default_value_t = 0)]
        exp_min: u32,
        #[arg(long, default_value_t = 12)]
        exp_max: u32,
        /// Relative frequencies of F0,F1,F2,F3.
        #[arg(long, value_delimiter = ',', default_values_t = [1u32, 1, 1, 1])]
        type_weights: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_values_t = [3u64, 5, 7])]
        primes: Vec<u64>,
        #[arg(long, value_enum, default_value = "any")]
        target: TargetArg,
        #[arg(long, default_value_t = 2000)]
        max_retries: u32,
    },
    /// Cross-check every closed form against its oracle on random data.
    Selftest {
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "corrected")]
        variant: Variant,
    },
}

fn read_doc(path: &Path) -> Result<InstanceDocument> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    InstanceDocument::from_json(&text).with_context(|| format!("{}", path.display()))
}

fn tau_json(v: &TauVector) -> Value {
    Value::Array(v.coords().iter().map(|s| Value::String(format_scalar(s))).collect())
}

fn matrix_json(a: &TauMatrix) -> Value {
    Value::Array((0..3).map(|r| Value::Array((0..3).map(|c| tau_json(a.get(r, c))).collect())).collect())
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

/// The JSON to print and whether the checked property holds.
fn run(cli: &Cli) -> Result<(Value, bool)> {
    match &cli.command {
        Command::Validate(input) => {
            let doc = read_doc(&input.input)?;
            let mut out = json!({"valid": true, "p": doc.p, "f": doc.f});
            if !doc.filt.is_empty() {
                let m = doc.module()?;
                out["module"] = InstanceDocument::from_module(&m).to_value();
            } else {
                doc.frobenius()?;
            }
            if doc.raw_filtration.is_some() {
                let fro = doc.frobenius()?;
                let raw = doc.raw()?;
                phimod_core::normalform::validate_raw(&fro, &raw)?;
            }
            if doc.monodromy.is_some() {
                doc.monodromy_entries()?;
            }
            Ok((out, true))
        }
        Command::CheckWa { input, oracle, variant } => {
            let m = read_doc(&input.input)?.module()?;
            let report = check_weak_admissibility_with(&m, (*variant).into());
            let mut out = to_value(&report);
            let mut ok = true;
            if *oracle {
                let o = oracle_weak_admissibility(&m);
                ok = o == report;
                out["oracle"] = to_value(&o);
                out["mismatch"] = Value::Bool(!ok);
            }
            Ok((out, ok))
        }
        Command::Iso { left, right, witness, oracle } => {
            let m1 = read_doc(left)?.module()?;
            let m2 = read_doc(right)?.module()?;
            let d = are_isomorphic(&m1, &m2)?;
            let cases: BTreeMap<String, String> =
                d.per_embedding_case.iter().enumerate().map(|(i, c)| (i.to_string(), c.clone())).collect();
            let mut out = json!({
                "isomorphic": d.isomorphic,
                "sigma": d.sigma.as_ref().map(permutation_name),
                "per_embedding_case": cases,
            });
            let mut ok = true;
            if *witness {
                out["witness"] = match &d.witness {
                    Some(w) => {
                        let valid = validate_witness(&m1, &m2, w);
                        ok &= valid.is_ok();
                        json!({
                            "sigma": permutation_name(&w.sigma),
                            "h": w.h.iter().map(tau_json).collect::<Vec<_>>(),
                            "matrix": matrix_json(&w.matrix()),
                            "valid": valid.is_ok(),
                            "reason": valid.err(),
                        })
                    }
                    None => Value::Null,
                };
            }
            if *oracle {
                let agrees = oracle_isomorphic(&m1, &m2)? == d.isomorphic;
                ok &= agrees;
                out["oracle_agrees"] = Value::Bool(agrees);
            }
            Ok((out, ok))
        }
        Command::Normalize(input) => {
            let doc = read_doc(&input.input)?;
            let fro = doc.frobenius()?;
            let raw = doc.raw()?;
            match normalize(&fro, &raw) {
                Ok(n) => Ok((
                    json!({
                        "representable": true,
                        "module": InstanceDocument::from_module(&n.module).to_value(),
                        "input_frobenius": InstanceDocument::from_frobenius(&fro).to_value(),
                        "permutation": n.permutation,
                        "rescaling": n.rescaling.iter().map(tau_json).collect::<Vec<_>>(),
                    }),
                    true,
                )),
                Err(NormalFormError::NotRepresentable) => Ok((
                    json!({"representable": false, "reason": NormalFormError::NotRepresentable.to_string()}),
                    false,
                )),
                Err(e) => Err(e.into()),
            }
        }
        Command::Monodromy { input, entries, positions } => {
            let doc = read_doc(&input.input)?;
            let fro = doc.frobenius()?;
            let eligible: Vec<String> = admissible_positions(&fro).iter().map(|p| p.to_string()).collect();
            if *positions {
                return Ok((json!({ "eligible": eligible }), true));
            }
            let entries = match entries {
                Some(text) => {
                    let m: BTreeMap<String, ScalarText> = serde_json::from_str(text).context("--entries")?;
                    parse_entries(&m)?
                }
                None => doc.monodromy_entries()?,
            };
            let a = build_monodromy(&fro, &entries)?;
            let v = validate_monodromy(&fro, &a);
            let valid = v.valid;
            Ok((json!({"eligible": eligible, "matrix": matrix_json(&a), "validation": to_value(&v)}), valid))
        }
        Command::Generate {
            seed,
            n,
            f_min,
            f_max,
            weight_max,
            exp_min,
            exp_max,
            type_weights,
            primes,
            target,
            max_retries,
        } => {
            let cfg = GeneratorConfig {
                seed: *seed,
                f_range: (*f_min, *f_max),
                weight_max: *weight_max,
                exponent_range: (*exp_min, *exp_max),
                type_weights: type_weights
                    .clone()
                    .try_into()
                    .map_err(|_| anyhow::anyhow!("--type-weights needs exactly four values"))?,
                target: (*target).into(),
                primes: primes.clone(),
                max_retries: *max_retries,
            };
            cfg.validate()?;
            let docs = (0..*n)
                .map(|k| generate_module_with(&mut stream(*seed, k), &cfg).map(|m| InstanceDocument::from_module(&m).to_value()))
                .collect::<Result<Vec<_>, _>>()?;
            let out = if *n == 1 { docs.into_iter().next().expect("one") } else { Value::Array(docs) };
            Ok((out, true))
        }
        Command::Selftest { n, seed, variant } => {
            let r = selftest(*n, *seed, (*variant).into())?;
            let ok = r.passed;
            Ok((to_value(&r), ok))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok((out, ok)) => {
            // serde_json::Value maps are sorted, so output is canonical.
            let text = if cli.pretty { serde_json::to_string_pretty(&out) } else { serde_json::to_string(&out) };
            // A closed pipe on stdout is not an error worth reporting.
            let _ = writeln!(std::io::stdout(), "{}", text.expect("serializable"));
            ExitCode::from(if ok { 0 } else { 2 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
