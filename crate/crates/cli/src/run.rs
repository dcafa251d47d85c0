use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ds2_core::checks::{
    all_pass, anomaly_suite, charge_suite, fock_suite, invariance_suite, krein_suite, limit_suite, positivity_suite,
    remark_suite, BoundKind, Check,
};
use ds2_core::kernels::{massive_w, massless_w, MassParam};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::Command;

pub enum Failure {
    Usage(String),
    Compute(String),
}

impl From<ds2_core::Error> for Failure {
    fn from(e: ds2_core::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

type Outcome<T> = Result<T, Failure>;

fn write(out: &Path, name: &str, contents: &str) -> Outcome<()> {
    fs::create_dir_all(out).map_err(|e| Failure::Usage(format!("{}: {e}", out.display())))?;
    let p = out.join(name);
    fs::write(&p, contents).map_err(|e| Failure::Compute(format!("{}: {e}", p.display())))
}

fn csv_header(cfg: &RunConfig, command: &str) -> String {
    let mut s = format!("# ds2 {command}\n");
    for l in cfg.header_lines() {
        let _ = writeln!(s, "# {l}");
    }
    s
}

/// Suite name, checks, extra data.
struct Section {
    name: &'static str,
    checks: Vec<Check>,
    data: Value,
}

impl Section {
    fn plain(name: &'static str, checks: Vec<Check>) -> Self {
        Self { name, checks, data: Value::Null }
    }
}

fn print_section(s: &Section) {
    for c in &s.checks {
        let rel = match c.kind {
            BoundKind::AtMost => "<=",
            BoundKind::AtLeast => ">=",
        };
        println!(
            "{} {}/{}: {:.3e} {rel} {:.1e}",
            if c.pass { "PASS" } else { "FAIL" },
            s.name,
            c.name,
            c.value,
            c.bound
        );
    }
}

fn report(cfg: &RunConfig, command: &str, sections: &[Section]) -> Outcome<bool> {
    let mut suites = Map::new();
    for s in sections {
        print_section(s);
        let mut v = json!({ "pass": all_pass(&s.checks), "checks": s.checks });
        if !s.data.is_null() {
            v["data"] = s.data.clone();
        }
        suites.insert(s.name.to_string(), v);
    }
    let pass = sections.iter().all(|s| all_pass(&s.checks));
    let doc = json!({ "command": command, "config": cfg, "pass": pass, "suites": suites });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Compute(e.to_string()))?;
    write(&cfg.out, &format!("{command}.json"), &(text + "\n"))?;
    Ok(pass)
}

fn kernel(cfg: &RunConfig) -> Outcome<bool> {
    let lambdas = cfg.lambda_grid().map_err(Failure::Usage)?;
    let mass = cfg.alpha.map(MassParam::real).transpose().map_err(|e| Failure::Usage(e.to_string()))?;
    let mut s = csv_header(cfg, "kernel");
    s.push_str("lambda,re,im\n");
    for l in lambdas {
        let z = Complex64::new(l, 0.0);
        let w = match mass {
            Some(m) => massive_w(m, z)?,
            None => massless_w(z, cfg.convention)?,
        };
        let _ = writeln!(s, "{l:.17e},{:.17e},{:.17e}", w.re + 0.0, w.im + 0.0);
    }
    write(&cfg.out, "kernel.csv", &s)?;
    println!("wrote {}", cfg.out.join("kernel.csv").display());
    Ok(true)
}

fn limit_sections(cfg: &RunConfig) -> Outcome<Vec<Section>> {
    let suite = cfg.suite().map_err(Failure::Usage)?;
    let (checks, fit) = limit_suite(&suite)?;
    let mut s = csv_header(cfg, "limit");
    s.push_str("alpha,residual\n");
    for (a, r) in fit.alphas.iter().zip(&fit.residuals) {
        let _ = writeln!(s, "{a:.17e},{r:.17e}");
    }
    write(&cfg.out, "limit.csv", &s)?;
    Ok(vec![
        Section { name: "massless_limit", checks, data: json!({ "slope": fit.slope, "constant": fit.constant }) },
        Section::plain("flat_remark", remark_suite()?),
    ])
}

fn krein_sections(cfg: &RunConfig) -> Outcome<Vec<Section>> {
    let suite = cfg.suite().map_err(Failure::Usage)?;
    let (checks, data) = krein_suite(&suite)?;
    Ok(vec![
        Section::plain("anomaly", anomaly_suite(&suite)?),
        Section::plain("positivity", positivity_suite(&suite)?),
        Section { name: "krein", checks, data },
    ])
}

fn fock_sections(cfg: &RunConfig) -> Outcome<Vec<Section>> {
    let (checks, data) = fock_suite(&cfg.suite().map_err(Failure::Usage)?)?;
    Ok(vec![Section { name: "fock", checks, data }])
}

fn charge_sections(cfg: &RunConfig) -> Outcome<Vec<Section>> {
    let out = charge_suite(&cfg.suite().map_err(Failure::Usage)?)?;
    write(&cfg.out, "charge.csv", &(csv_header(cfg, "charge") + &out.csv))?;
    Ok(vec![Section { name: "charge", checks: out.checks, data: out.summary }])
}

fn invariance_sections(cfg: &RunConfig) -> Outcome<Vec<Section>> {
    Ok(vec![Section::plain("invariance", invariance_suite(&cfg.suite().map_err(Failure::Usage)?)?)])
}

pub fn dispatch(command: Command, cfg: &RunConfig) -> Outcome<bool> {
    match command {
        Command::Kernel { .. } => kernel(cfg),
        Command::Limit => report(cfg, "limit", &limit_sections(cfg)?),
        Command::Krein => report(cfg, "krein", &krein_sections(cfg)?),
        Command::Fock => report(cfg, "fock", &fock_sections(cfg)?),
        Command::Charge => report(cfg, "charge", &charge_sections(cfg)?),
        Command::Invariance => report(cfg, "invariance", &invariance_sections(cfg)?),
        Command::All => {
            let mut sections = limit_sections(cfg)?;
            sections.extend(krein_sections(cfg)?);
            sections.extend(invariance_sections(cfg)?);
            sections.extend(fock_sections(cfg)?);
            sections.extend(charge_sections(cfg)?);
            report(cfg, "all", &sections)
        }
    }
}
