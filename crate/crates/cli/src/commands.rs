use std::fs;
use std::path::Path;

use anyhow::{bail, Context as _, Result};
use rcl_core::certify::{compute_certificate, squared_norm, CertifyOutcome, ConfigurationX, SphericityCertificate};
use rcl_core::coloring::{colour_norm, colour_norm_detailed, Colour};
use rcl_core::equidist::etk::{c_weight, default_c_r, etk_evaluate};
use rcl_core::equidist::{
    discrepancy::{EXACT_LIMIT_R1, EXACT_LIMIT_R2},
    discrepancy_report, effective_m, lemma1_check as core_lemma1, weyl_sum, Lemma1Status,
};
use rcl_core::lineseq::{empirical_m, first_red_index, torus_sequence, LineParams, ParamMode, SamplingPlan};
use rcl_core::numfield::{format_vector, parse_vector, FieldElement};
use rcl_core::redcheck::{scan_for_red_copies, ScanConfig};
use rcl_core::spec_builder::{build_spec as core_build_spec, ColoringSpec};
use serde::Serialize;

use crate::manifest::RunManifest;
use crate::output::{emit, json_report, write_text};
use crate::{
    BuildSpecArgs, CertifyArgs, ColourArgs, Context, DiscrepancyArgs, EtkArgs, Lemma1Args, LineArgs, RedcheckArgs,
    ScanLineArgs, SearchMArgs, Usage, Violation, WeylArgs,
};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_config(path: &Path) -> Result<ConfigurationX> {
    ConfigurationX::from_json_str(&read(path)?).with_context(|| format!("parsing configuration {}", path.display()))
}

fn certificate_of(path: &Path) -> Result<SphericityCertificate> {
    match compute_certificate(&load_config(path)?)? {
        CertifyOutcome::NonSpherical(c) => Ok(c),
        CertifyOutcome::Spherical => bail!("configuration is spherical; no colouring can be built"),
    }
}

pub fn load_spec(path: &Path) -> Result<ColoringSpec> {
    let spec = ColoringSpec::from_json_str(&read(path)?).with_context(|| format!("parsing spec {}", path.display()))?;
    Ok(spec)
}

fn load_valid_spec(path: &Path) -> Result<ColoringSpec> {
    let spec = load_spec(path)?;
    spec.validate()?;
    Ok(spec)
}

fn manifest(ctx: &Context, command: &str, params: impl Serialize) -> RunManifest {
    let mut m = RunManifest::new(command, params);
    if ctx.timing {
        m.wall_time_s = Some(ctx.start.elapsed().as_secs_f64());
    }
    m
}

fn line_params(line: &LineArgs) -> Result<LineParams> {
    LineParams::parse(&line.beta, &line.gamma, line.m).map_err(|e| Usage(e.to_string()).into())
}

fn c_r_value(s: &str, r: usize) -> Result<f64> {
    if s == "default" {
        return Ok(default_c_r(r));
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(Usage(format!("--C-r must be a positive number or \"default\", got {s:?}")).into()),
    }
}

#[derive(Serialize)]
struct CertifyResult {
    spherical: bool,
    certificate: Option<SphericityCertificate>,
}

pub fn certify(ctx: &Context, a: &CertifyArgs) -> Result<()> {
    let outcome = compute_certificate(&load_config(&a.config)?)?;
    let cert = outcome.certificate().cloned();
    if a.json {
        let res = CertifyResult {
            spherical: cert.is_none(),
            certificate: cert,
        };
        print!("{}", json_report(&manifest(ctx, "certify", a), &res));
        return Ok(());
    }
    match cert {
        Some(c) => println!("non-spherical\nc = {}\nB = {}", format_vector(&c.c), c.b),
        None => println!("spherical"),
    }
    Ok(())
}

pub fn build_spec(a: &BuildSpecArgs) -> Result<()> {
    let spec = core_build_spec(&certificate_of(&a.config)?)?;
    let mut text = spec.to_json_string();
    text.push('\n');
    write_text(a.out.as_ref(), &text)
}

#[derive(Serialize)]
struct ColourResult {
    norm: FieldElement,
    colour: Colour,
    floors: Vec<String>,
}

pub fn colour(ctx: &Context, a: &ColourArgs) -> Result<()> {
    let spec = load_valid_spec(&a.spec)?;
    let y = match (&a.norm, &a.point) {
        (Some(n), _) => n.parse::<FieldElement>().map_err(|e| Usage(format!("--norm: {e}")))?,
        (None, Some(p)) => squared_norm(&parse_vector(p).map_err(|e| Usage(format!("--point: {e}")))?),
        (None, None) => unreachable!("clap requires --norm or --point"),
    };
    let d = colour_norm_detailed(&spec, &y)?;
    let floors: Vec<String> = d.floors.iter().map(ToString::to_string).collect();
    if a.json {
        let res = ColourResult {
            norm: y,
            colour: d.colour,
            floors,
        };
        print!("{}", json_report(&manifest(ctx, "colour", a).with_spec(&spec), &res));
    } else {
        println!("{}\nfloors: {}", d.colour, floors.join(" "));
    }
    Ok(())
}

pub fn redcheck(ctx: &Context, a: &RedcheckArgs) -> Result<()> {
    let spec = if a.allow_invalid_spec {
        load_spec(&a.spec)?
    } else {
        load_valid_spec(&a.spec)?
    };
    let cfg = ScanConfig {
        numerator_bits: a.numerator_bits,
        denominator_bits: a.denominator_bits,
        ..ScanConfig::default()
    };
    let rep = scan_for_red_copies(&spec, a.samples, a.seed, cfg)?;
    let man = manifest(ctx, "redcheck", a).with_seed(a.seed).with_spec(&spec);
    emit(&a.out, &man, &rep, || {
        let mut s = String::from("red_entries,count\n");
        for (c, n) in rep.red_histogram.iter().enumerate() {
            s.push_str(&format!("{c},{n}\n"));
        }
        s
    })?;
    if rep.all_red_count > 0 {
        return Err(Violation(format!("{} all-red tuples on the copy equation", rep.all_red_count)).into());
    }
    if rep.chain_failures > 0 {
        return Err(Violation(format!("inequality chain failed on {} samples", rep.chain_failures)).into());
    }
    Ok(())
}

#[derive(Serialize)]
struct ScanLineResult {
    beta: String,
    gamma: String,
    mode: ParamMode,
    m: u64,
    first_red: Option<u64>,
    y_first_red: Option<String>,
    colour_first_red: Option<Colour>,
}

pub fn scan_line(ctx: &Context, a: &ScanLineArgs) -> Result<()> {
    let spec = load_valid_spec(&a.spec)?;
    let lp = line_params(&a.line)?;
    let first_red = first_red_index(&spec, &lp);
    let y = first_red.map(|j| FieldElement::from_rational(lp.y(j)));
    let colour_first_red = y.as_ref().and_then(|y| colour_norm(&spec, y).ok());
    let res = ScanLineResult {
        beta: lp.beta_string(),
        gamma: lp.gamma_string(),
        mode: lp.mode,
        m: lp.m,
        first_red,
        y_first_red: y.as_ref().map(ToString::to_string),
        colour_first_red,
    };
    print!("{}", json_report(&manifest(ctx, "scan-line", a).with_spec(&spec), &res));
    if colour_first_red == Some(Colour::Blue) {
        return Err(Violation("torus box hit at a blue norm".into()).into());
    }
    Ok(())
}

fn parse_grid(s: &str) -> Result<(u32, u32)> {
    let bad = || Usage(format!("--grid must look like 100x100, got {s:?}"));
    let (b, g) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((b.trim().parse().map_err(|_| bad())?, g.trim().parse().map_err(|_| bad())?))
}

pub fn search_m(ctx: &Context, a: &SearchMArgs) -> Result<()> {
    let spec = load_valid_spec(&a.spec)?;
    let (gb, gg) = parse_grid(&a.grid)?;
    let plan = SamplingPlan::standard(&spec, gb, gg, a.random, a.seed);
    let rep = empirical_m(&spec, &plan, a.m_cap)?;
    let man = manifest(ctx, "search-m", a).with_seed(a.seed).with_spec(&spec);
    emit(&a.out, &man, &rep, || rep.to_csv())?;
    if rep.lemma1.counterexamples > 0 {
        return Err(Violation(format!(
            "{} prefixes with small discrepancy but no red hit",
            rep.lemma1.counterexamples
        ))
        .into());
    }
    if rep.colour_mismatches > 0 {
        return Err(Violation(format!("{} first red indices colour blue", rep.colour_mismatches)).into());
    }
    Ok(())
}

pub fn discrepancy(ctx: &Context, a: &DiscrepancyArgs) -> Result<()> {
    let spec = load_valid_spec(&a.spec)?;
    let lp = line_params(&a.line)?;
    let z = torus_sequence(&spec, &lp);
    let in_exact_range = match z.r {
        1 => z.len() <= EXACT_LIMIT_R1,
        2 => z.len() <= EXACT_LIMIT_R2,
        _ => false,
    };
    let effort = match (a.exact, a.effort) {
        (true, _) => None,
        (false, Some(e)) => Some(e),
        (false, None) if in_exact_range => None,
        (false, None) => Some(4),
    };
    let etk = match a.n {
        Some(n) => Some((n, c_r_value(&a.c_r, spec.r)?)),
        None => None,
    };
    let rep = discrepancy_report(&z, effort, etk)?;
    let man = manifest(ctx, "discrepancy", a).with_spec(&spec);
    emit(&a.out, &man, &rep, || {
        let opt = |v: Option<f64>| v.map_or_else(String::new, |x| format!("{x:?}"));
        format!(
            "m,r,method,d_star_lower,d_star_upper,d_extreme_lower,d_extreme_upper,etk_rhs\n{},{},{},{:?},{:?},{:?},{:?},{}\n",
            rep.m,
            rep.r,
            serde_json::to_value(rep.method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            rep.d_star.lower,
            rep.d_star.upper,
            rep.d_extreme.lower,
            rep.d_extreme.upper,
            opt(rep.etk_rhs)
        )
    })?;
    let bad = rep.inconsistencies();
    if !bad.is_empty() {
        return Err(Violation(bad.join("; ")).into());
    }
    Ok(())
}

fn h_string(h: &[i64]) -> String {
    h.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}

pub fn etk(ctx: &Context, a: &EtkArgs) -> Result<()> {
    let spec = load_valid_spec(&a.spec)?;
    let lp = line_params(&a.line)?;
    let c_r = c_r_value(&a.c_r, spec.r)?;
    let z = torus_sequence(&spec, &lp);
    let ev = etk_evaluate(&z, a.n, c_r)?;
    let man = manifest(ctx, "etk", a).with_spec(&spec);
    emit(&a.out, &man, &ev, || {
        let mut s = String::from("h,magnitude_over_m,c_h\n");
        for t in &ev.terms {
            s.push_str(&format!("{},{:?},{:?}\n", h_string(&t.h), t.magnitude_over_m, c_weight(&t.h)));
        }
        s
    })
}

pub fn weyl(ctx: &Context, a: &WeylArgs) -> Result<()> {
    let spec = load_valid_spec(&a.spec)?;
    let lp = line_params(&a.line)?;
    let h: Vec<i64> = a
        .h
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Usage(format!("--h must be comma-separated integers, got {:?}", a.h)))?;
    if h.len() != spec.r {
        return Err(Usage(format!("--h needs {} entries for r = {}", spec.r, spec.r)).into());
    }
    let z = torus_sequence(&spec, &lp);
    let w = weyl_sum(&z, &h);
    let man = manifest(ctx, "weyl", a).with_spec(&spec);
    emit(&a.out, &man, &w, || {
        format!(
            "h,m,re,im,magnitude_over_m\n{},{},{:?},{:?},{:?}\n",
            h_string(&w.h),
            w.m,
            w.re,
            w.im,
            w.magnitude_over_m
        )
    })
}

pub fn lemma1_check(ctx: &Context, a: &Lemma1Args) -> Result<()> {
    let spec = load_valid_spec(&a.spec)?;
    let lp = line_params(&a.line)?;
    let c_r = c_r_value(&a.c_r, spec.r)?;
    let man = manifest(ctx, "lemma1-check", a).with_spec(&spec);
    let status = if a.recipe {
        let rep = effective_m(&spec, &lp, c_r, a.m_start.min(lp.m), lp.m)?;
        emit(&a.out, &man, &rep, || {
            let mut s = String::from("m,scaled_tail\n");
            for (m, t) in &rep.trajectory {
                s.push_str(&format!("{m},{t:?}\n"));
            }
            s
        })?;
        rep.report.map(|r| r.status)
    } else {
        let thr = rcl_core::equidist::lemma1::recipe_cutoff(&spec, c_r)?;
        let rep = core_lemma1(&spec, &lp, a.n.unwrap_or(thr), c_r)?;
        emit(&a.out, &man, &rep, || {
            format!(
                "m,N,C_r,threshold,d_star_upper,d_extreme_upper,etk,first_red,status\n{},{},{:?},{:?},{:?},{:?},{:?},{},{:?}\n",
                rep.m,
                rep.n,
                rep.c_r,
                rep.threshold,
                rep.d_star.upper,
                rep.d_extreme.upper,
                rep.etk,
                rep.first_red.map_or_else(String::new, |j| j.to_string()),
                rep.status
            )
        })?;
        Some(rep.status)
    };
    if status == Some(Lemma1Status::Violated) {
        return Err(Violation("discrepancy below 1/p^r without a red hit".into()).into());
    }
    Ok(())
}
