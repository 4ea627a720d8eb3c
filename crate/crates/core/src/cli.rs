//! Command-line interface: one subcommand per operation, JSON on stdout.
//!
//! Every run prints a single document `{"query": ..., "result": ...}` so
//! the output is self-describing; `--batch FILE` processes one query per
//! line (the same objects that appear under `"query"`) and prints one
//! document per line in input order.  Rationals are strings like `"-3/4"`,
//! integers are plain JSON numbers at full precision.
//!
//! Exit codes: 0 on success, 2 for usage errors, runtime errors, or a
//! failed `verify`, and 3 when a computation gave up against a resource
//! bound (factoring or enumeration limits).

use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arith::{set_trial_limit, Int, Rat};
use crate::decide::{
    excluded_progressions, integer_witness, is_represented, rational_witness_jobs,
    universal_over_z, Failure, Witness,
};
use crate::error::Error;
use crate::forms::{diagonalize, normalize_with_detail, DiagonalForm, TernaryForm};
use crate::local::{prime_obstructions, two_adic_classify};
use crate::oracle::{verify_form, CheckStatus};

const DEFAULT_MAX_DEN: u32 = 24;
const DEFAULT_MAX_NUM: u64 = 600;

#[derive(Parser)]
#[command(
    name = "ternaryq",
    version,
    about = "Rational representability of ternary quadratic forms",
    after_help = "Coefficients and targets are rationals written as 'p' or 'p/q'.\n\
                  All results are JSON on stdout."
)]
struct Cli {
    /// Largest common denominator tried by witness searches.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_DEN)]
    max_den: u32,

    /// Largest numerator magnitude tried by witness searches.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_NUM)]
    max_num: u64,

    /// Trial-division bound for factoring; overrides TERNARYQ_TRIAL_LIMIT.
    #[arg(long, global = true)]
    trial_limit: Option<u64>,

    /// Worker threads for witness searches.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Read JSON-Lines queries from FILE ('-' for stdin) instead of a
    /// subcommand; one result document per line, input order kept.
    #[arg(long, value_name = "FILE")]
    batch: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

/// The three diagonal coefficients; leading hyphens are values, not flags,
/// so negative coefficients need no '--' separator.
#[derive(clap::Args)]
struct FormArgs {
    #[arg(allow_hyphen_values = true)]
    a: String,
    #[arg(allow_hyphen_values = true)]
    b: String,
    #[arg(allow_hyphen_values = true)]
    c: String,
}

impl From<FormArgs> for [String; 3] {
    fn from(f: FormArgs) -> Self {
        [f.a, f.b, f.c]
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a x^2 + b y^2 + c z^2 represents n over the rationals.
    Decide {
        #[command(flatten)]
        form: FormArgs,
        #[arg(allow_hyphen_values = true)]
        n: String,
    },
    /// Search for a rational point with f(x, y, z) = n.
    Witness {
        #[command(flatten)]
        form: FormArgs,
        #[arg(allow_hyphen_values = true)]
        n: String,
    },
    /// Normalize and classify the form's excluded two-adic residue class.
    Classify2 {
        #[command(flatten)]
        form: FormArgs,
    },
    /// List odd primes where the normalized form is locally blocked.
    Obstructions {
        #[command(flatten)]
        form: FormArgs,
    },
    /// List arithmetic progressions of numbers the form never represents.
    Excluded {
        #[command(flatten)]
        form: FormArgs,
    },
    /// Reduce the form to coprime squarefree integer coefficients.
    Normalize {
        #[command(flatten)]
        form: FormArgs,
    },
    /// Diagonalize the symmetric matrix of a general ternary form.
    Diagonalize {
        #[arg(allow_hyphen_values = true)]
        q11: String,
        #[arg(allow_hyphen_values = true)]
        q22: String,
        #[arg(allow_hyphen_values = true)]
        q33: String,
        #[arg(allow_hyphen_values = true)]
        q12: String,
        #[arg(allow_hyphen_values = true)]
        q13: String,
        #[arg(allow_hyphen_values = true)]
        q23: String,
    },
    /// Test whether a mixed-sign form represents every integer over Z.
    Universal {
        #[command(flatten)]
        form: FormArgs,
    },
    /// Re-derive the form's headline facts by brute force and compare.
    Verify {
        #[command(flatten)]
        form: FormArgs,
        /// Members checked per excluded progression.
        #[arg(long, default_value_t = 6)]
        count: u32,
    },
}

/// A single operation request; this is also the JSON-Lines batch format.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case", deny_unknown_fields)]
pub enum Query {
    Decide {
        form: [String; 3],
        target: String,
    },
    Witness {
        form: [String; 3],
        target: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_den: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_num: Option<u64>,
    },
    Classify2 {
        form: [String; 3],
    },
    Obstructions {
        form: [String; 3],
    },
    Excluded {
        form: [String; 3],
    },
    Normalize {
        form: [String; 3],
    },
    Diagonalize {
        gram: [String; 6],
    },
    Universal {
        form: [String; 3],
    },
    Verify {
        form: [String; 3],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        count: Option<u32>,
    },
}

/// Search bounds taken from the global flags unless a query overrides them.
#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub max_den: u32,
    pub max_num: u64,
    pub jobs: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { max_den: DEFAULT_MAX_DEN, max_num: DEFAULT_MAX_NUM, jobs: 1 }
    }
}

impl Command {
    fn into_query(self) -> Query {
        match self {
            Command::Decide { form, n } => Query::Decide { form: form.into(), target: n },
            Command::Witness { form, n } => Query::Witness {
                form: form.into(),
                target: n,
                max_den: None,
                max_num: None,
            },
            Command::Classify2 { form } => Query::Classify2 { form: form.into() },
            Command::Obstructions { form } => Query::Obstructions { form: form.into() },
            Command::Excluded { form } => Query::Excluded { form: form.into() },
            Command::Normalize { form } => Query::Normalize { form: form.into() },
            Command::Diagonalize { q11, q22, q33, q12, q13, q23 } => {
                Query::Diagonalize { gram: [q11, q22, q33, q12, q13, q23] }
            }
            Command::Universal { form } => Query::Universal { form: form.into() },
            Command::Verify { form, count } => {
                Query::Verify { form: form.into(), count: Some(count) }
            }
        }
    }
}

fn parse_rat(s: &str) -> Result<Rat, Error> {
    Rat::from_str(s.trim())
        .map_err(|e| Error::PreconditionViolated(format!("cannot parse rational '{s}': {e}")))
}

fn parse_form(form: &[String; 3]) -> Result<DiagonalForm, Error> {
    DiagonalForm::new(parse_rat(&form[0])?, parse_rat(&form[1])?, parse_rat(&form[2])?)
}

/// Integers as full-precision JSON numbers.
fn int_value(n: &Int) -> Value {
    Value::Number(
        serde_json::Number::from_str(&n.to_string()).expect("integer is a valid JSON number"),
    )
}

/// Rationals as strings: "p" when integral, "p/q" otherwise.
fn rat_string(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn witness_value(w: &Witness) -> Value {
    json!({
        "x": rat_string(&w.x),
        "y": rat_string(&w.y),
        "z": rat_string(&w.z),
        "target": rat_string(&w.target),
    })
}

fn failure_value(f: &Failure) -> Value {
    match f {
        Failure::SignMismatch => json!({ "kind": "sign_mismatch" }),
        Failure::TwoAdicExclusion { modulus, residue } => json!({
            "kind": "two_adic_exclusion",
            "modulus": modulus,
            "residue": residue,
        }),
        Failure::PrimeCondition { p, neg_product_symbol, unit_symbol } => json!({
            "kind": "prime_condition",
            "p": int_value(p),
            "neg_product_symbol": neg_product_symbol,
            "unit_symbol": unit_symbol,
        }),
    }
}

fn normalized_value(nf: &crate::forms::NormalizedForm) -> Value {
    json!({
        "coefficients": [int_value(&nf.a), int_value(&nf.b), int_value(&nf.c)],
        "lambda": rat_string(&nf.lambda),
        "multipliers": [rat_string(&nf.u1), rat_string(&nf.u2), rat_string(&nf.u3)],
    })
}

/// Run one query and build its `"result"` payload.
pub fn run_query(query: &Query, settings: &Settings) -> Result<Value, Error> {
    match query {
        Query::Decide { form, target } => {
            let f = parse_form(form)?;
            let n = parse_rat(target)?;
            let verdict = is_represented(&f, &n)?;
            Ok(json!({
                "represented": verdict.represented,
                "failures": verdict.failures.iter().map(failure_value).collect::<Vec<_>>(),
            }))
        }
        Query::Witness { form, target, max_den, max_num } => {
            let f = parse_form(form)?;
            let n = parse_rat(target)?;
            let max_den = max_den.unwrap_or(settings.max_den);
            let max_num = max_num.unwrap_or(settings.max_num);
            let verdict = is_represented(&f, &n)?;
            let (witness, method) = if !verdict.represented {
                (None, Value::Null)
            } else if let Some(w) =
                rational_witness_jobs(&f, &n, max_den, max_num, settings.jobs)
            {
                (Some(w), json!("search"))
            } else if n.is_integer() && universal_over_z(&f).unwrap_or(false) {
                // Bounded search exhausted but the form is universal over
                // the integers: build the witness directly.
                (Some(integer_witness(&f, &n.to_integer())?), json!("constructive"))
            } else {
                (None, Value::Null)
            };
            Ok(json!({
                "represented": verdict.represented,
                "witness": witness.as_ref().map(witness_value),
                "method": method,
                "max_den": max_den,
                "max_num": max_num,
            }))
        }
        Query::Classify2 { form } => {
            let f = parse_form(form)?;
            let nf = crate::forms::normalize(&f)?;
            let class = match two_adic_classify(&nf).excluded() {
                Some((modulus, residue)) => json!({
                    "class": "excluded",
                    "modulus": modulus,
                    "residue": residue,
                }),
                None => json!({ "class": "complete" }),
            };
            Ok(json!({ "normalized": normalized_value(&nf), "two_adic": class }))
        }
        Query::Obstructions { form } => {
            let f = parse_form(form)?;
            let nf = crate::forms::normalize(&f)?;
            let obs = prime_obstructions(&nf)?
                .iter()
                .map(|o| {
                    json!({
                        "p": int_value(&o.p),
                        "symbol": o.symbol,
                        "excluded_unit_residues":
                            o.excluded_unit_residues.iter().map(int_value).collect::<Vec<_>>(),
                    })
                })
                .collect::<Vec<_>>();
            Ok(json!({ "normalized": normalized_value(&nf), "obstructions": obs }))
        }
        Query::Excluded { form } => {
            let f = parse_form(form)?;
            let progressions = excluded_progressions(&f)?
                .iter()
                .map(|p| {
                    json!({
                        "residue": int_value(&p.residue),
                        "modulus": int_value(&p.modulus),
                    })
                })
                .collect::<Vec<_>>();
            Ok(json!({ "progressions": progressions }))
        }
        Query::Normalize { form } => {
            let f = parse_form(form)?;
            let (nf, detail) = normalize_with_detail(&f)?;
            Ok(json!({
                "normalized": normalized_value(&nf),
                "detail": {
                    "d": int_value(&detail.d),
                    "d1": int_value(&detail.d1),
                    "d2": int_value(&detail.d2),
                    "d3": int_value(&detail.d3),
                    "s": int_value(&detail.s),
                },
            }))
        }
        Query::Diagonalize { gram } => {
            let q = TernaryForm::new(
                parse_rat(&gram[0])?,
                parse_rat(&gram[1])?,
                parse_rat(&gram[2])?,
                parse_rat(&gram[3])?,
                parse_rat(&gram[4])?,
                parse_rat(&gram[5])?,
            )?;
            let (diag, transform) = diagonalize(&q)?;
            let rows: Vec<Value> = transform
                .m
                .iter()
                .map(|row| Value::Array(row.iter().map(|v| json!(rat_string(v))).collect()))
                .collect();
            Ok(json!({
                "diagonal": [rat_string(&diag.a), rat_string(&diag.b), rat_string(&diag.c)],
                "transform": rows,
            }))
        }
        Query::Universal { form } => {
            let f = parse_form(form)?;
            Ok(json!({ "universal": universal_over_z(&f)? }))
        }
        Query::Verify { form, count } => {
            let f = parse_form(form)?;
            let report = verify_form(&f, count.unwrap_or(6))?;
            let checks: Vec<Value> = report
                .checks
                .iter()
                .map(|c| {
                    json!({
                        "name": c.name,
                        "status": match c.status {
                            CheckStatus::Ok => "ok",
                            CheckStatus::Failed => "failed",
                            CheckStatus::Skipped => "skipped",
                        },
                        "detail": c.detail,
                    })
                })
                .collect();
            Ok(json!({ "ok": report.ok, "checks": checks }))
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::NotInvertible { .. } => "not_invertible",
        Error::FactorLimitExceeded { .. } => "factor_limit_exceeded",
        Error::InvalidModulus(_) => "invalid_modulus",
        Error::NonResidue { .. } => "non_residue",
        Error::ModuliNotCoprime(_, _) => "moduli_not_coprime",
        Error::DegenerateForm => "degenerate_form",
        Error::ModulusTooLarge { .. } => "modulus_too_large",
        Error::NotLiftable { .. } => "not_liftable",
        Error::NoSolution(_) => "no_solution",
        Error::PreconditionViolated(_) => "precondition_violated",
    }
}

fn error_value(e: &Error) -> Value {
    json!({ "kind": error_kind(e), "message": e.to_string() })
}

/// Exit status of one processed query: 0 ok, 2 error or failed verify,
/// 3 resource limit.
fn status_of(result: &Result<Value, Error>) -> i32 {
    match result {
        Ok(v) => {
            if v.get("ok").and_then(Value::as_bool) == Some(false) {
                2
            } else {
                0
            }
        }
        Err(e) if e.is_limit() => 3,
        Err(_) => 2,
    }
}

fn document(query: &Query, result: Result<Value, Error>) -> (Value, i32) {
    let status = status_of(&result);
    let doc = match result {
        Ok(result) => json!({ "query": query, "result": result }),
        Err(e) => json!({ "query": query, "error": error_value(&e) }),
    };
    (doc, status)
}

fn run_batch(path: &PathBuf, settings: &Settings, out: &mut impl Write) -> std::io::Result<i32> {
    let reader: Box<dyn BufRead> = if path.as_os_str() == "-" {
        Box::new(std::io::stdin().lock())
    } else {
        Box::new(std::io::BufReader::new(std::fs::File::open(path)?))
    };
    let mut worst = 0;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let doc = match serde_json::from_str::<Query>(&line) {
            Ok(query) => {
                let (mut doc, status) = document(&query, run_query(&query, settings));
                doc["line"] = json!(idx + 1);
                worst = worst.max(status);
                doc
            }
            Err(e) => {
                worst = worst.max(2);
                json!({
                    "line": idx + 1,
                    "error": { "kind": "bad_query", "message": e.to_string() },
                })
            }
        };
        writeln!(out, "{doc}")?;
    }
    Ok(worst)
}

/// Parse arguments, execute, print JSON; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    if let Some(bound) = cli.trial_limit {
        set_trial_limit(bound);
    }
    let settings = Settings { max_den: cli.max_den, max_num: cli.max_num, jobs: cli.jobs };
    let stdout = std::io::stdout();

    if let Some(path) = &cli.batch {
        if cli.command.is_some() {
            eprintln!("ternaryq: --batch and a subcommand are mutually exclusive");
            return 2;
        }
        return match run_batch(path, &settings, &mut stdout.lock()) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("ternaryq: cannot process batch: {e}");
                2
            }
        };
    }

    let Some(command) = cli.command else {
        eprintln!("ternaryq: a subcommand or --batch is required; see --help");
        return 2;
    };
    let query = command.into_query();
    let (doc, status) = document(&query, run_query(&query, &settings));
    println!("{}", serde_json::to_string_pretty(&doc).expect("document serializes"));
    status
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q3(a: &str, b: &str, c: &str) -> [String; 3] {
        [a.into(), b.into(), c.into()]
    }

    #[test]
    fn big_integers_keep_full_precision() {
        let n: Int = Int::from(10).pow(40) + 7;
        let v = int_value(&n);
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            "10000000000000000000000000000000000000007"
        );
    }

    #[test]
    fn rational_strings_reduce() {
        assert_eq!(rat_string(&Rat::new(Int::from(4), Int::from(2))), "2");
        assert_eq!(rat_string(&Rat::new(Int::from(-1), Int::from(2))), "-1/2");
    }

    #[test]
    fn decide_query_reports_failures() {
        let settings = Settings::default();
        let q = Query::Decide { form: q3("1", "1", "1"), target: "7".into() };
        let v = run_query(&q, &settings).unwrap();
        assert_eq!(v["represented"], json!(false));
        assert_eq!(v["failures"][0]["kind"], json!("two_adic_exclusion"));
        assert_eq!(v["failures"][0]["residue"], json!(7));
    }

    #[test]
    fn witness_query_finds_ramanujan_point() {
        let settings = Settings::default();
        let q = Query::Witness {
            form: q3("1", "1", "10"),
            target: "3".into(),
            max_den: Some(4),
            max_num: Some(20),
        };
        let v = run_query(&q, &settings).unwrap();
        assert_eq!(v["witness"]["x"], json!("1/2"));
        assert_eq!(v["method"], json!("search"));
    }

    #[test]
    fn witness_query_constructive_fallback() {
        // Bounds too small for search, but the form is universal over Z.
        let settings = Settings { max_den: 1, max_num: 1, jobs: 1 };
        let q = Query::Witness {
            form: q3("1", "1", "-1"),
            target: "7".into(),
            max_den: None,
            max_num: None,
        };
        let v = run_query(&q, &settings).unwrap();
        assert_eq!(v["method"], json!("constructive"));
        assert!(v["witness"].is_object());
    }

    #[test]
    fn classify_and_excluded_queries() {
        let settings = Settings::default();
        let v = run_query(&Query::Classify2 { form: q3("1", "1", "10") }, &settings).unwrap();
        assert_eq!(v["two_adic"]["modulus"], json!(16));
        assert_eq!(v["two_adic"]["residue"], json!(6));

        let v = run_query(&Query::Excluded { form: q3("1", "1", "10") }, &settings).unwrap();
        assert_eq!(v["progressions"][0]["residue"], json!(390));
        assert_eq!(v["progressions"][0]["modulus"], json!(400));
    }

    #[test]
    fn normalize_and_diagonalize_queries() {
        let settings = Settings::default();
        let v = run_query(&Query::Normalize { form: q3("2", "6", "15") }, &settings).unwrap();
        assert_eq!(v["normalized"]["coefficients"], json!([3, 1, 10]));
        assert_eq!(v["normalized"]["lambda"], json!("6"));
        assert_eq!(v["detail"]["s"], json!(5));

        // x^2 + 2xy + 3y^2 + z^2.
        let q = Query::Diagonalize {
            gram: ["1", "3", "1", "2", "0", "0"].map(String::from),
        };
        let v = run_query(&q, &settings).unwrap();
        assert_eq!(v["diagonal"], json!(["1", "2", "1"]));
    }

    #[test]
    fn universal_and_verify_queries() {
        let settings = Settings::default();
        let v = run_query(&Query::Universal { form: q3("2", "3", "-5") }, &settings).unwrap();
        assert_eq!(v["universal"], json!(true));

        let v = run_query(
            &Query::Verify { form: q3("1", "1", "10"), count: Some(3) },
            &settings,
        )
        .unwrap();
        assert_eq!(v["ok"], json!(true));
    }

    #[test]
    fn errors_carry_kind_and_exit_status() {
        let settings = Settings::default();
        let q = Query::Decide { form: q3("1", "1", "0"), target: "3".into() };
        let err = run_query(&q, &settings).unwrap_err();
        assert_eq!(error_kind(&err), "degenerate_form");
        assert_eq!(status_of(&Err(err)), 2);

        let limit = Error::FactorLimitExceeded { cofactor: Int::from(9), bound: 4 };
        assert_eq!(status_of(&Err(limit)), 3);

        let failed_verify = Ok(json!({ "ok": false, "checks": [] }));
        assert_eq!(status_of(&failed_verify), 2);
    }

    #[test]
    fn queries_roundtrip_through_json() {
        let q = Query::Witness {
            form: q3("1", "1", "10"),
            target: "3".into(),
            max_den: None,
            max_num: Some(50),
        };
        let s = serde_json::to_string(&q).unwrap();
        assert!(!s.contains("max_den"), "absent options stay absent: {s}");
        let back: Query = serde_json::from_str(&s).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), s);

        let parsed: Query =
            serde_json::from_str(r#"{"command":"decide","form":["1","1","1"],"target":"-7/9"}"#)
                .unwrap();
        let v = run_query(&parsed, &Settings::default()).unwrap();
        assert_eq!(v["represented"], json!(false));
    }

    #[test]
    fn batch_lines_keep_order_and_embed_errors() {
        let input = "\
{\"command\":\"decide\",\"form\":[\"1\",\"1\",\"1\"],\"target\":\"3\"}\n\
not json\n\
\n\
{\"command\":\"decide\",\"form\":[\"1\",\"1\",\"1\"],\"target\":\"7\"}\n";
        let dir = std::env::temp_dir().join("ternaryq-batch-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("queries.jsonl");
        std::fs::write(&path, input).unwrap();

        let mut out = Vec::new();
        let code = run_batch(&path, &Settings::default(), &mut out).unwrap();
        assert_eq!(code, 2, "bad line escalates the exit code");
        let lines: Vec<Value> = String::from_utf8(out)
            .unwrap()
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(lines.len(), 3, "blank line skipped");
        assert_eq!(lines[0]["line"], json!(1));
        assert_eq!(lines[0]["result"]["represented"], json!(true));
        assert_eq!(lines[1]["line"], json!(2));
        assert_eq!(lines[1]["error"]["kind"], json!("bad_query"));
        assert_eq!(lines[2]["line"], json!(4));
        assert_eq!(lines[2]["result"]["represented"], json!(false));
    }
}
