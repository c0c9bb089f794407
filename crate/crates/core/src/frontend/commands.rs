use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::connections::fundamental_sequence;
use crate::derivations::{dual_basis, Derivation};
use crate::dgmod::{SemifreeModule, Tensor};
use crate::enveloping::Extension;
use crate::gca::Element;
use crate::lifting::{
    atiyah_map, check_atiyah_identity, check_classical_identity, check_kodaira_spencer, classical_atiyah,
    decide_fesox, decide_naive_lifting, h0_nu_surjective, kodaira_spencer, nj_target, tensor_sequence, Verdict,
};
use crate::report::Check;
use crate::target::Target;
use crate::{par, Error};

use super::{generate_random_instance, load, print_instance, FrontendError, Instance, Profile};

pub const VERBS: &[&str] = &["validate", "atiyah", "lift", "ks", "fesox", "exactseq", "h0nu", "omega", "random"];

/// Coefficient target for `exactseq`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Along {
    #[default]
    B,
    J,
    Omega,
}

impl Along {
    pub fn parse(s: &str) -> Option<Along> {
        match s {
            "B" => Some(Along::B),
            "J" => Some(Along::J),
            "Omega" => Some(Along::Omega),
            _ => None,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Along::B => "B",
            Along::J => "J",
            Along::Omega => "Omega",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CommandOptions {
    pub module: Option<String>,
    pub along: Along,
    pub degrees: Option<(i32, i32)>,
    pub seed: u64,
    pub profile: String,
    /// Instances in a random-corpus experiment.
    pub count: usize,
    pub jobs: Option<usize>,
    pub experiment: bool,
}

impl Default for CommandOptions {
    fn default() -> Self {
        CommandOptions {
            module: None,
            along: Along::B,
            degrees: None,
            seed: 0,
            profile: "tiny".into(),
            count: 100,
            jobs: None,
            experiment: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CommandOutput {
    pub exit_code: i32,
    pub json: Value,
    pub text: String,
}

impl CommandOutput {
    fn ok(json: Value, text: String) -> Self {
        CommandOutput {
            exit_code: 0,
            json,
            text,
        }
    }

    fn error(command: &str, e: &FrontendError) -> Self {
        let mut err = json!({ "kind": e.kind(), "message": e.to_string() });
        if let FrontendError::Parse(p) = e {
            err["line"] = json!(p.line);
            err["column"] = json!(p.column);
            err["message"] = json!(p.message);
        }
        CommandOutput {
            exit_code: e.exit_code(),
            text: format!("error ({}): {e}\n", e.kind()),
            json: json!({ "command": command, "error": err }),
        }
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn checks_text(checks: &[Check]) -> String {
    let mut s = String::new();
    for c in checks {
        let _ = write!(s, "  [{}] {} {}", if c.passed { "ok" } else { "FAIL" }, c.name, c.subject);
        if !c.detail.is_empty() {
            let _ = write!(s, ": {}", c.detail);
        }
        s.push('\n');
    }
    s
}

fn map_text(title: &str, m: &BTreeMap<String, String>) -> String {
    let mut s = format!("{title}:\n");
    for (k, v) in m {
        let _ = writeln!(s, "  {k} -> {v}");
    }
    s
}

/// Runs one CLI verb. `document` is the instance text; only `random`
/// works without one.
pub fn run_command(command: &str, document: Option<&str>, opts: &CommandOptions) -> CommandOutput {
    let run = || -> Result<CommandOutput, FrontendError> {
        if command == "random" {
            return random(opts);
        }
        if !VERBS.contains(&command) {
            return Err(Error::Mismatch(format!("unknown command '{command}'")).into());
        }
        let text = document.ok_or_else(|| Error::Mismatch(format!("'{command}' needs a document")))?;
        let (_, inst) = load(text)?;
        let report = inst.validate();
        if command == "validate" {
            let valid = report.is_valid();
            let text = format!("valid: {valid}\n{}", checks_text(&report.checks));
            return Ok(CommandOutput {
                exit_code: if valid { 0 } else { 1 },
                json: json!({ "command": command, "valid": valid, "checks": report.checks }),
                text,
            });
        }
        if !report.is_valid() {
            let bad = report.failures().next().expect("invalid report has a failure");
            return Ok(CommandOutput {
                exit_code: 1,
                text: format!("invalid instance: {} ({}) {}\n", bad.name, bad.subject, bad.detail),
                json: json!({
                    "command": command,
                    "error": { "kind": "invalid", "message": format!("{} ({})", bad.name, bad.subject) },
                    "checks": report.checks,
                }),
            });
        }
        let ext = inst.extension()?;
        let mut out = match command {
            "omega" => omega(&ext),
            "atiyah" => atiyah(&inst, &ext, opts),
            "lift" => lift(&inst, &ext, opts),
            "ks" => ks(&inst, &ext, opts),
            "fesox" => fesox(&inst, &ext, opts),
            "exactseq" => exactseq(&inst, &ext, opts),
            "h0nu" => h0nu(&inst, &ext, opts),
            _ => unreachable!("verbs checked above"),
        }?;
        out.json["command"] = json!(command);
        Ok(out)
    };
    run().unwrap_or_else(|e| CommandOutput::error(command, &e))
}

fn selected(inst: &Instance, opts: &CommandOptions) -> Result<(String, Arc<SemifreeModule>), FrontendError> {
    let n = inst.module(opts.module.as_deref())?;
    Ok((inst.module_name(opts.module.as_deref()).unwrap_or_default(), n))
}

/// Exit code 1 when an internal identity check failed.
fn status(checks: &[Check]) -> i32 {
    if checks.iter().all(|c| c.passed) {
        0
    } else {
        1
    }
}

fn omega(ext: &Extension) -> Result<CommandOutput, FrontendError> {
    let om = ext.omega().module();
    let basis: Vec<Value> = (0..om.rank())
        .map(|l| json!({ "name": om.name(l), "degree": om.degree(l), "d": om.format(&om.basis_image(l)) }))
        .collect();
    let report = ext.omega().validate(ext.enveloping());
    let mut text = String::from("Ω basis:\n");
    for l in 0..om.rank() {
        let _ = writeln!(text, "  {} (deg {}), d = {}", om.name(l), om.degree(l), om.format(&om.basis_image(l)));
    }
    text.push_str(&checks_text(&report.checks));
    Ok(CommandOutput {
        exit_code: status(&report.checks),
        json: json!({ "basis": basis, "semifree": true, "checks": report.checks }),
        text,
    })
}

fn atiyah(inst: &Instance, ext: &Extension, opts: &CommandOptions) -> Result<CommandOutput, FrontendError> {
    let (name, n) = selected(inst, opts)?;
    let nj = nj_target(ext, &n);
    let alpha = atiyah_map(ext, &n);
    let images: BTreeMap<String, String> =
        (0..n.rank()).map(|l| (n.name(l).to_string(), nj.format(&alpha.images[l]))).collect();
    let zero = alpha.images.iter().all(|y| nj.is_zero(y));
    let abar = classical_atiyah(ext, &n);
    let no = crate::lifting::n_omega(ext, &n);
    let classical: BTreeMap<String, String> =
        (0..n.rank()).map(|l| (n.name(l).to_string(), no.format(&abar.images[l]))).collect();
    let mut report = check_atiyah_identity(ext, &n);
    report.extend(check_classical_identity(ext, &n));
    let text = format!(
        "module {name}: α is {}\n{}{}{}",
        if zero { "zero" } else { "nonzero" },
        map_text("α", &images),
        map_text("ᾱ", &classical),
        checks_text(&report.checks)
    );
    Ok(CommandOutput {
        exit_code: status(&report.checks),
        json: json!({ "module": name, "alpha": images, "zero": zero, "classical": classical, "checks": report.checks }),
        text,
    })
}

fn lift(inst: &Instance, ext: &Extension, opts: &CommandOptions) -> Result<CommandOutput, FrontendError> {
    let (name, n) = selected(inst, opts)?;
    let r = decide_naive_lifting(ext, &n)?;
    let mut json = to_value(&r);
    json["module"] = json!(name);
    let mut text = format!("module {name}: {}\n", r.verdict.as_str());
    if let Some(f) = &r.witness_f {
        text.push_str(&map_text("f", f));
    }
    if let Some(p) = &r.witness_psi {
        text.push_str(&map_text("ψ", p));
    }
    if let Some(c) = &r.certificate {
        let _ = writeln!(
            text,
            "certificate: {} rows over {} equations, pairing {}",
            c.rows.len(),
            c.equations,
            c.pairing
        );
    }
    text.push_str(&checks_text(&r.checks));
    Ok(CommandOutput {
        exit_code: status(&r.checks),
        json,
        text,
    })
}

fn ks(inst: &Instance, ext: &Extension, opts: &CommandOptions) -> Result<CommandOutput, FrontendError> {
    let (name, n) = selected(inst, opts)?;
    let b = ext.algebra();
    let mut ds: Vec<(String, Derivation<Element>)> = b
        .extension_indices()
        .into_iter()
        .zip(dual_basis(b))
        .map(|(i, d)| (format!("∂[{}]", b.generator(i).name), d))
        .collect();
    for (dn, _, _) in &inst.derivations {
        ds.push((dn.clone(), inst.derivation(dn)?));
    }
    let mut values = Vec::new();
    let mut text = format!("module {name}\n");
    for (dn, d) in &ds {
        let k = kodaira_spencer(ext, &n, d);
        let images: BTreeMap<String, String> =
            (0..n.rank()).map(|l| (n.name(l).to_string(), n.format(&k.images[l]))).collect();
        text.push_str(&map_text(&format!("κ({dn})"), &images));
        values.push(json!({ "derivation": dn, "degree": d.degree, "kappa": images }));
    }
    let only: Vec<Derivation<Element>> = ds.into_iter().map(|(_, d)| d).collect();
    let report = check_kodaira_spencer(ext, &n, &only);
    text.push_str(&checks_text(&report.checks));
    Ok(CommandOutput {
        exit_code: status(&report.checks),
        json: json!({ "module": name, "values": values, "checks": report.checks }),
        text,
    })
}

fn fesox(inst: &Instance, ext: &Extension, opts: &CommandOptions) -> Result<CommandOutput, FrontendError> {
    let (name, n) = selected(inst, opts)?;
    let r = decide_fesox(ext, &n)?;
    let mut json = to_value(&r);
    json["module"] = json!(name);
    let text = format!(
        "module {name}: (i) {} (ix) {} agree {}\n{}",
        r.condition_i,
        r.condition_ix,
        r.agree,
        checks_text(&r.checks)
    );
    Ok(CommandOutput {
        exit_code: if r.all_passed() { 0 } else { 1 },
        json,
        text,
    })
}

fn exactseq(inst: &Instance, ext: &Extension, opts: &CommandOptions) -> Result<CommandOutput, FrontendError> {
    let (name, n) = selected(inst, opts)?;
    let (lo, hi) = opts.degrees.unwrap_or((-6, 6));
    if lo > hi {
        return Err(Error::Window(format!("empty degree window {lo}..{hi}")).into());
    }
    let rows = match opts.along {
        Along::B => fundamental_sequence(&Tensor::new(n.clone(), ext.b_target()), lo, hi)?,
        Along::J => fundamental_sequence(&Tensor::new(n.clone(), ext.j_target()), lo, hi)?,
        Along::Omega => fundamental_sequence(&Tensor::new(n.clone(), ext.omega_target()), lo, hi)?,
    };
    let tensor = tensor_sequence(ext, &n, lo, hi)?;
    let exact = rows.iter().all(|r| r.exact());
    let tensor_exact = tensor.iter().all(|r| r.exact());
    let mut text = format!("module {name}, X = {}, degrees {lo}..{hi}\n  deg  Hom  Der  Conn  ker ν  exact\n", opts.along.as_str());
    for r in &rows {
        let _ = writeln!(text, "  {:>3}  {:>3}  {:>3}  {:>4}  {:>5}  {}", r.degree, r.hom, r.der, r.conn, r.ker_nu, r.exact());
    }
    let _ = writeln!(text, "0 → N⊗J → N⊗B^e → N → 0 exact: {tensor_exact}");
    Ok(CommandOutput {
        exit_code: if exact && tensor_exact { 0 } else { 1 },
        json: json!({
            "module": name,
            "along": opts.along.as_str(),
            "degrees": [lo, hi],
            "rows": rows,
            "exact": exact,
            "tensor_rows": tensor,
            "tensor_exact": tensor_exact,
        }),
        text,
    })
}

fn h0nu(inst: &Instance, ext: &Extension, opts: &CommandOptions) -> Result<CommandOutput, FrontendError> {
    let (name, n) = selected(inst, opts)?;
    let r = h0_nu_surjective(ext, &n)?;
    let mut json = to_value(&r);
    json["module"] = json!(name);
    let text = format!(
        "module {name}: H0(ν) surjective {} (rank {} of {}), lifting {}, consistent {}\n",
        r.surjective,
        r.image_rank,
        r.dim_z0_der,
        r.verdict.as_str(),
        r.consistent
    );
    Ok(CommandOutput {
        exit_code: if r.consistent { 0 } else { 1 },
        json,
        text,
    })
}

fn profile(opts: &CommandOptions) -> Result<Profile, FrontendError> {
    Profile::named(&opts.profile).ok_or_else(|| {
        Error::Mismatch(format!("unknown profile '{}' (known: {})", opts.profile, Profile::names().join(", "))).into()
    })
}

fn random(opts: &CommandOptions) -> Result<CommandOutput, FrontendError> {
    let p = profile(opts)?;
    if opts.experiment {
        return experiment(opts, &p);
    }
    let doc = generate_random_instance(opts.seed, &p)?;
    let text = print_instance(&doc);
    Ok(CommandOutput::ok(
        json!({ "command": "random", "seed": opts.seed, "profile": p.name, "document": text }),
        text,
    ))
}

#[derive(Serialize)]
struct ExperimentRow {
    seed: u64,
    verdict: Option<Verdict>,
    fesox_i: Option<bool>,
    fesox_ix: Option<bool>,
    note: Option<String>,
}

/// Cross-tabulates the lifting verdict against the classical-Atiyah and
/// Kodaira-Spencer conditions on seeds `seed..seed+count`. Instances where
/// those conditions hold but lifting fails are listed; nothing is asserted.
fn experiment(opts: &CommandOptions, p: &Profile) -> Result<CommandOutput, FrontendError> {
    let seeds: Vec<u64> = (0..opts.count as u64).map(|k| opts.seed.wrapping_add(k)).collect();
    let run_one = |&seed: &u64| -> ExperimentRow {
        let mut row = ExperimentRow {
            seed,
            verdict: None,
            fesox_i: None,
            fesox_ix: None,
            note: None,
        };
        let outcome = (|| -> Result<(), FrontendError> {
            let doc = generate_random_instance(seed, p)?;
            let inst = super::elaborate(&doc)?;
            let ext = inst.extension()?;
            let n = inst.module(None)?;
            row.verdict = Some(decide_naive_lifting(&ext, &n)?.verdict);
            let f = decide_fesox(&ext, &n)?;
            row.fesox_i = Some(f.condition_i);
            row.fesox_ix = Some(f.condition_ix);
            Ok(())
        })();
        if let Err(e) = outcome {
            row.note = Some(e.to_string());
        }
        row
    };
    let rows = match opts.jobs {
        Some(j) => par::with_threads(j, || par::map(&seeds, run_one)),
        None => par::map(&seeds, run_one),
    };
    let mut table: BTreeMap<&str, usize> = BTreeMap::new();
    for key in ["liftable/fesox", "liftable/not-fesox", "not-liftable/fesox", "not-liftable/not-fesox", "skipped"] {
        table.insert(key, 0);
    }
    let mut anomalies = Vec::new();
    for r in &rows {
        let key = match (r.verdict, r.fesox_i) {
            (Some(Verdict::Liftable), Some(true)) => "liftable/fesox",
            (Some(Verdict::Liftable), Some(false)) => "liftable/not-fesox",
            (Some(Verdict::NotLiftable), Some(true)) => {
                anomalies.push(r.seed);
                "not-liftable/fesox"
            }
            (Some(Verdict::NotLiftable), Some(false)) => "not-liftable/not-fesox",
            _ => "skipped",
        };
        *table.get_mut(key).expect("known key") += 1;
    }
    let mut text = format!("experiment: profile {}, seeds {}..{}\n", p.name, opts.seed, opts.seed.wrapping_add(opts.count as u64));
    for (k, v) in &table {
        let _ = writeln!(text, "  {k:<24} {v}");
    }
    let _ = writeln!(text, "fesox holds but lifting fails: {anomalies:?}");
    Ok(CommandOutput::ok(
        json!({
            "command": "random",
            "experiment": { "profile": p.name, "seed": opts.seed, "count": opts.count, "table": table, "anomalies": anomalies, "rows": rows },
        }),
        text,
    ))
}

