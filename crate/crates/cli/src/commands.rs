use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rep2ldc::bounds::{avg_fixed_space, check_rank_separation, entropy_audit, EntropyAudit};
use rep2ldc::construct::{
    build_q_ldc, build_special_2ldc, lambda_variant, verify_cert, CertVerification, ConstructionCert, ZSearch,
};
use rep2ldc::fixtures::{Fixture, CATALOG};
use rep2ldc::grouprep::{ElemRef, GroupSpec, MatrixGroup, DEFAULT_CAP};
use rep2ldc::ldc::{CodeForm, LdcInstance, LdcJson, VerificationReport};
use rep2ldc::{Field, Scalar};
use serde_json::json;

use crate::args::{CapArg, ConstructArgs, DemoArgs, FixturesCommand, Format, GroupSource, RankScanArgs, VerifyArgs};
use crate::exit::{Failure, FAILED, OK};

type Outcome = Result<u8, Failure>;

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::parse(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

fn no_csv(format: Format) -> Result<(), Failure> {
    if format == Format::Csv {
        return Err(Failure::parse("csv output is only available for rank-scan"));
    }
    Ok(())
}

fn load_group(source: &GroupSource, cap: &CapArg) -> Result<(MatrixGroup, String), Failure> {
    if let Some(name) = &source.fixture {
        let fixture = Fixture::parse(name)?;
        let group = fixture.generate(cap.cap.unwrap_or(DEFAULT_CAP))?;
        return Ok((group, fixture.to_string()));
    }
    let path = source.input.as_ref().expect("clap requires a source");
    let mut spec = GroupSpec::from_json(&read(path)?)?;
    if let Some(c) = cap.cap {
        spec.cap = c;
    }
    Ok((MatrixGroup::close(spec)?, path.display().to_string()))
}

fn parse_elem(group: &MatrixGroup, s: &str) -> Result<ElemRef, Failure> {
    let digits = s.trim().trim_start_matches('g');
    let k: usize = digits
        .parse()
        .map_err(|_| Failure::parse(format!("element index {s:?} is not a number")))?;
    Ok(group.check(ElemRef(k))?)
}

fn parse_scalar(field: Field, s: &str) -> Result<Scalar, Failure> {
    Ok(field.parse_scalar(s)?)
}

pub fn rank_scan(a: RankScanArgs) -> Outcome {
    let (group, label) = load_group(&a.source, &a.cap)?;
    let reports = check_rank_separation(&group);
    let avg = avg_fixed_space(&group);
    let violations = reports.iter().filter(|r| !r.satisfied).count();
    let text = match a.common.format {
        Format::Json => {
            let v = json!({
                "group": label,
                "order": group.order(),
                "dim": group.dim(),
                "irreducible": group.burnside_irreducible(),
                "reports": reports,
                "violations": violations,
                "fixed_space_average": avg,
            });
            serde_json::to_string_pretty(&v)? + "\n"
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "h",
                "ord",
                "gamma",
                "theta",
                "n",
                "group_size",
                "lower_bound",
                "actual_rank",
                "satisfied",
                "uniform_bound",
                "uniform_satisfied",
            ])?;
            for r in &reports {
                w.write_record([
                    r.h.0.to_string(),
                    r.ord.to_string(),
                    r.gamma.to_string(),
                    r.theta.to_string(),
                    r.n.to_string(),
                    r.group_size.to_string(),
                    format!("{:.6}", r.lower_bound_value),
                    r.actual_rank.to_string(),
                    r.satisfied.to_string(),
                    format!("{:.6}", r.uniform_bound_value),
                    r.uniform_satisfied.to_string(),
                ])?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Failure::parse(e.to_string()))?)
                .expect("csv output is utf-8")
        }
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "{label}: |G| = {}, n = {}", group.order(), group.dim()).unwrap();
            writeln!(s, "{:>7} {:>5} {:>8} {:>10} {:>5}  ok", "h", "ord", "gamma", "bound", "rank").unwrap();
            for r in &reports {
                writeln!(
                    s,
                    "{:>7} {:>5} {:>8} {:>10.6} {:>5}  {}",
                    r.h.to_string(),
                    r.ord,
                    r.gamma.to_string(),
                    r.lower_bound_value,
                    r.actual_rank,
                    if r.satisfied { "yes" } else { "NO" }
                )
                .unwrap();
            }
            writeln!(s, "{} elements checked, {violations} violations", reports.len()).unwrap();
            writeln!(
                s,
                "average fixed-space dimension {} (n/2 = {}){}",
                avg.average,
                avg.bound,
                if avg.applicable { "" } else { "; group not certified irreducible" }
            )
            .unwrap();
            s
        }
    };
    emit(a.common.output.as_deref(), &text)?;
    Ok(if violations == 0 { OK } else { FAILED })
}

fn build(a: &ConstructArgs, group: &MatrixGroup) -> Result<ConstructionCert, Failure> {
    let field = group.field();
    let search = ZSearch::with_seed(a.seed);
    if !a.hs.is_empty() {
        let hs = a.hs.iter().map(|s| parse_elem(group, s)).collect::<Result<Vec<_>, _>>()?;
        let alphas = a.alphas.iter().map(|s| parse_scalar(field, s)).collect::<Result<Vec<_>, _>>()?;
        if hs.len() != alphas.len() {
            return Err(Failure::parse(format!("{} elements but {} coefficients", hs.len(), alphas.len())));
        }
        if a.q.is_some_and(|q| q != hs.len()) {
            return Err(Failure::parse("--q must equal the number of --hs entries"));
        }
        return Ok(build_q_ldc(group, &hs, &alphas, &search)?);
    }
    let h = a
        .h
        .as_deref()
        .ok_or_else(|| Failure::parse("give --h, or --hs with --alphas"))?;
    let h = parse_elem(group, h)?;
    if let Some(l) = &a.lambda {
        return Ok(lambda_variant(group, h, &parse_scalar(field, l)?, &search)?);
    }
    match a.q {
        Some(2) => Ok(build_q_ldc(group, &[h, group.identity()], &[field.one(), -field.one()], &search)?),
        Some(_) => Err(Failure::parse("with --h the general construction has q = 2; use --hs/--alphas")),
        None => Ok(build_special_2ldc(group, h, &search)?),
    }
}

pub fn construct(a: ConstructArgs) -> Outcome {
    no_csv(a.format)?;
    let (group, label) = load_group(&a.source, &a.cap)?;
    let cert = build(&a, &group)?;
    let report = cert.verify(&group);
    let cert_json = cert.to_json() + "\n";
    if let Some(p) = &a.output {
        emit(Some(p), &cert_json)?;
    }
    let summary = match (a.format, &a.output) {
        (Format::Json, None) => cert_json,
        (Format::Json, Some(p)) => {
            let v = json!({
                "group": label,
                "kind": cert.kind,
                "m": cert.m(),
                "t": cert.t(),
                "rank": cert.rank(),
                "t_lower_bound": cert.t_lower_bound,
                "achieved_delta": cert.achieved_delta.to_string(),
                "target_delta": cert.code.claimed_delta.to_string(),
                "verified": report.pass,
                "entropy_audit": report.entropy.as_ref().map(|e| e.pass),
                "certificate": p,
            });
            serde_json::to_string_pretty(&v)? + "\n"
        }
        _ => construct_text(&label, &cert, &report, a.output.as_ref()),
    };
    emit(None, &summary)?;
    Ok(if report.pass { OK } else { FAILED })
}

fn construct_text(label: &str, cert: &ConstructionCert, report: &CertVerification, out: Option<&PathBuf>) -> String {
    let mut s = String::new();
    let kind = format!("{:?}", cert.kind).to_lowercase();
    writeln!(s, "{kind} construction on {label}").unwrap();
    writeln!(
        s,
        "  m = {}, t = {} (ceil(n/R) = {}), R = {}",
        cert.m(),
        cert.t(),
        cert.t_lower_bound,
        cert.rank()
    )
    .unwrap();
    let z: Vec<String> = cert.z.iter().map(ToString::to_string).collect();
    let method = format!("{:?}", cert.z_method).to_lowercase();
    writeln!(s, "  z = ({}) by {method} search, {} points tried", z.join(", "), cert.z_draws).unwrap();
    writeln!(
        s,
        "  kept/candidates per coordinate: {}",
        cert.beta_nonzero_count
            .iter()
            .zip(&cert.pre_filter_counts)
            .map(|(k, p)| format!("{k}/{p}"))
            .collect::<Vec<_>>()
            .join(" ")
    )
    .unwrap();
    writeln!(
        s,
        "  delta = {} (target {})",
        cert.achieved_delta, cert.code.claimed_delta
    )
    .unwrap();
    write_cert_checks(&mut s, report);
    match out {
        Some(p) => writeln!(s, "  certificate written to {}", p.display()).unwrap(),
        None => writeln!(s, "  certificate not saved (use --output)").unwrap(),
    }
    s
}

fn write_audit(s: &mut String, audit: &EntropyAudit) {
    writeln!(
        s,
        "  entropy audit: {} (H = {:.6}, log2 m = {:.6}, 2 delta t = {}){}",
        if audit.pass { "pass" } else { "FAIL" },
        audit.entropy,
        audit.log2_m,
        audit.matching_bound,
        if audit.tight { ", tight: m = 2^(2 delta t)" } else { "" }
    )
    .unwrap();
}

fn write_ldc_failures(s: &mut String, report: &VerificationReport) {
    for c in report.coordinates.iter().filter(|c| !c.pass) {
        for f in &c.failures {
            writeln!(s, "    coordinate {}, set {} {:?}: {}", c.coordinate, f.set, f.members, f.reason).unwrap();
        }
    }
}

fn write_cert_checks(s: &mut String, report: &CertVerification) {
    for c in &report.checks {
        match &c.detail {
            Some(d) => writeln!(s, "  [FAIL] {}: {d}", c.name).unwrap(),
            None => writeln!(s, "  [ok]   {}", c.name).unwrap(),
        }
    }
    if let Some(l) = &report.ldc {
        write_ldc_failures(s, l);
    }
    if let Some(a) = &report.entropy {
        write_audit(s, a);
    }
    writeln!(s, "  verdict: {}", if report.pass { "pass" } else { "FAIL" }).unwrap();
}

pub fn verify(a: VerifyArgs) -> Outcome {
    no_csv(a.common.format)?;
    let text = read(&a.input)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let out = a.common.output.as_deref();
    if value.get("code").is_some() {
        let (cert, report) = verify_cert(&text)?;
        let body = match a.common.format {
            Format::Json => serde_json::to_string_pretty(&report)? + "\n",
            _ => {
                let kind = format!("{:?}", cert.kind).to_lowercase();
                let mut s = format!("certificate: {kind} construction, m = {}, t = {}\n", cert.m(), cert.t());
                write_cert_checks(&mut s, &report);
                s
            }
        };
        emit(out, &body)?;
        return Ok(if report.pass { OK } else { FAILED });
    }

    let j: LdcJson = serde_json::from_value(value)?;
    let code = LdcInstance::from_json(j)?;
    let report = code.verify();
    let audit = match code.form {
        CodeForm::Special2 => Some(entropy_audit(&code).map_err(|e| e.to_string())),
        CodeForm::General => None,
    };
    let audit_ok = match &audit {
        Some(Ok(a)) => a.pass,
        Some(Err(_)) => false,
        None => true,
    };
    let pass = report.pass && audit_ok;
    let body = match a.common.format {
        Format::Json => {
            let audit_json = match &audit {
                Some(Ok(a)) => serde_json::to_value(a)?,
                Some(Err(e)) => json!({ "error": e }),
                None => json!("not applicable"),
            };
            serde_json::to_string_pretty(&json!({ "ldc": report, "entropy_audit": audit_json, "pass": pass }))? + "\n"
        }
        _ => {
            let mut s = format!(
                "{:?} ({}-query) code: m = {}, t = {}, delta = {} (claimed {})\n",
                code.form, code.q, report.m, report.t, report.achieved_delta, report.claimed_delta
            );
            writeln!(s, "  matchings: {}", if report.coordinates.iter().all(|c| c.pass) { "valid" } else { "INVALID" })
                .unwrap();
            write_ldc_failures(&mut s, &report);
            if !report.delta_ok {
                writeln!(s, "  achieved delta is below the claim").unwrap();
            }
            match &audit {
                Some(Ok(a)) => write_audit(&mut s, a),
                Some(Err(e)) => writeln!(s, "  entropy audit: FAIL ({e})").unwrap(),
                None => writeln!(s, "  entropy audit: not applicable to general-form codes").unwrap(),
            }
            writeln!(s, "  verdict: {}", if pass { "pass" } else { "FAIL" }).unwrap();
            s
        }
    };
    emit(out, &body)?;
    Ok(if pass { OK } else { FAILED })
}

pub fn demo(a: DemoArgs) -> Outcome {
    no_csv(a.common.format)?;
    let field = Field::from_char(a.field)?;
    let fixture = Fixture::SignedShift { n: 4, field };
    let group = fixture.generate(DEFAULT_CAP)?;
    let h = ElemRef(1);
    let mut steps: Vec<(String, bool)> = Vec::new();

    steps.push((
        format!(
            "{fixture}: |G| = {} = 4 * 2^4, irreducible, rank(rho({h}) - I) = {}",
            group.order(),
            group.minus_identity(h).rank()
        ),
        group.order() == 64 && group.burnside_irreducible() && group.minus_identity(h).rank() == 1,
    ));

    let cert = build_special_2ldc(&group, h, &ZSearch::with_seed(a.seed))?;
    let report = cert.verify(&group);
    let identities = (0..cert.t()).all(|j| group.refs().all(|s| cert.tuple_identity_holds(&group, j, s)));
    steps.push((
        format!(
            "special 2-LDC: m = {}, t = {}, delta = {} >= {}",
            cert.m(),
            cert.t(),
            cert.achieved_delta,
            cert.code.claimed_delta
        ),
        cert.achieved_delta >= cert.code.claimed_delta,
    ));
    steps.push((format!("certificate checks ({} of them)", report.checks.len()), report.pass));
    steps.push((
        format!("tuple identities for all {} x {} (j, s)", cert.t(), group.order()),
        identities,
    ));
    let audit = entropy_audit(&cert.code)?;
    steps.push((
        format!(
            "entropy audit: log2 m = {:.4} >= 2 delta t = {}",
            audit.log2_m,
            audit.matching_bound
        ),
        audit.pass,
    ));
    let scan = check_rank_separation(&group);
    let refl = scan.iter().find(|r| r.h == h).expect("reflection acts nontrivially");
    steps.push((
        format!(
            "rank scan: {} elements, all rank(g - I) >= bound (reflection: {} >= {:.4})",
            scan.len(),
            refl.actual_rank,
            refl.lower_bound_value
        ),
        scan.iter().all(|r| r.satisfied),
    ));
    let avg = avg_fixed_space(&group);
    steps.push((
        format!("average fixed-space dimension {} <= n/2 = {}", avg.average, avg.bound),
        avg.pass,
    ));
    let had = rep2ldc::ldc::hadamard(4, Field::Prime(2))?;
    let had_audit = entropy_audit(&had)?;
    steps.push((
        "hadamard(4): special (2, 1/2)-LDC with m = 2^(2 delta n) exactly".to_string(),
        had.verify().pass && had_audit.tight,
    ));

    let all = steps.iter().all(|(_, ok)| *ok);
    let body = match a.common.format {
        Format::Json => {
            let v = json!({
                "seed": a.seed,
                "field": a.field,
                "steps": steps.iter().map(|(s, ok)| json!({"step": s, "pass": ok})).collect::<Vec<_>>(),
                "pass": all,
            });
            serde_json::to_string_pretty(&v)? + "\n"
        }
        _ => {
            let mut s = String::new();
            for (line, ok) in &steps {
                writeln!(s, "[{}] {line}", if *ok { "ok" } else { "FAIL" }).unwrap();
            }
            let z: Vec<String> = cert.z.iter().map(ToString::to_string).collect();
            writeln!(s, "seed {} gave z = ({})", a.seed, z.join(", ")).unwrap();
            s
        }
    };
    emit(a.common.output.as_deref(), &body)?;
    Ok(if all { OK } else { FAILED })
}

pub fn fixtures(c: FixturesCommand) -> Outcome {
    match c {
        FixturesCommand::List => {
            let mut s = String::new();
            for (_, syntax, about) in CATALOG {
                writeln!(s, "{syntax:<20} {about}").unwrap();
            }
            emit(None, &s)?;
        }
        FixturesCommand::Export { fixture, output } => {
            let f = Fixture::parse(&fixture)?;
            let text = if f.is_group() {
                let group = f.generate(DEFAULT_CAP)?;
                serde_json::to_string_pretty(group.spec())?
            } else {
                serde_json::to_string_pretty(&f.ldc()?.to_json())?
            };
            emit(output.as_deref(), &(text + "\n"))?;
        }
    }
    Ok(OK)
}
