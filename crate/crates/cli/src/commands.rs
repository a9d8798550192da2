use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use kolakoski::coincidence::{
    coincidence_matrix, full_coincidence, height, minimal_coincidence, spectral_verdict, CoincidenceMatrix,
};
use kolakoski::derive::{derive, height_one_substitution, DerivedKind, DerivedSubstitution};
use kolakoski::diffraction::{bragg_support, diffraction_spectrum, effective_support_gcd, kolakoski_exponential_sum};
use kolakoski::kolakoski::{kolakoski_prefix, kolakoski_prefix_by_substitution, render_values};
use kolakoski::model_set::{
    coset_decomposition, coset_partition, cut_project_descriptor, ifs_system, letter_frequencies, CosetDecomposition,
};
use kolakoski::render::{render, ColorMap, Dimension, EmbeddingSpec};
use kolakoski::spectrum::{spectrum_report, Level};
use kolakoski::{Error, EvenParams, KolParams, Substitution};
use num_complex::Complex64;
use num_rational::Rational64;
use serde_json::{json, Value};

use crate::config::*;
use crate::json;
use crate::usage;

/// Runs one configuration and returns what goes to the output.
pub fn execute(config: &RunConfig) -> Result<String> {
    let echo = config.to_json();
    let doc = match config {
        RunConfig::Generate(a) => return generate(a, echo),
        RunConfig::Derive(a) => derive_cmd(a, echo)?,
        RunConfig::Analyze(a) => {
            let mut doc = json!({ "config": echo });
            merge(&mut doc, analysis(EvenParams::new(a.m, a.n)?)?);
            doc
        }
        RunConfig::Cosets(a) => cosets(a, echo)?,
        RunConfig::Diffract(a) => diffract(a, echo)?,
        RunConfig::Visualize(a) => return visualize(a, config),
        RunConfig::Report(a) => report(a, echo)?,
    };
    Ok(pretty(&doc))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serialises");
    s.push('\n');
    s
}

fn merge(doc: &mut Value, more: Value) {
    if let (Value::Object(a), Value::Object(b)) = (doc, more) {
        a.extend(b);
    }
}

fn generate(a: &GenerateArgs, echo: Value) -> Result<String> {
    let mut params = KolParams::new(a.p, a.q)?;
    if a.side == SideArg::Left {
        params = params.swapped();
    }
    let values = match a.method {
        Method::RunLength => kolakoski_prefix(params, a.n)?,
        Method::Substitution => kolakoski_prefix_by_substitution(params, a.n)?,
    };
    Ok(match a.format {
        Format::Text => format!("{}\n", render_values(&values)),
        Format::Json => pretty(&json!({ "config": echo, "sequence": values })),
    })
}

fn kind_of(kind: KindArg, params: EvenParams) -> Result<DerivedSubstitution> {
    let kind = match kind {
        KindArg::Auto => return Ok(height_one_substitution(params)?),
        KindArg::BlockedSigma => DerivedKind::BlockedSigma,
        KindArg::Numbered => DerivedKind::Numbered,
        KindArg::Theta => DerivedKind::Theta,
        KindArg::ThetaTilde => DerivedKind::ThetaTilde,
    };
    Ok(derive(kind, params)?)
}

/// Maps "this substitution does not support the question" to `null`.
fn optional<T>(r: kolakoski::Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::NotConstantLength | Error::HeightNotOne(_) | Error::NotPrimitive) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn derive_cmd(a: &DeriveArgs, echo: Value) -> Result<Value> {
    let params = EvenParams::new(a.m, a.n)?;
    let d = kind_of(a.kind, params)?;
    let sub = &d.sub;
    let text = sub.to_text();
    if let Some(path) = &a.rules {
        fs::write(path, &text).with_context(|| format!("cannot write {}", path.display()))?;
    }
    let h = optional(height(sub))?;
    let coincidence = optional(full_coincidence(sub))?.flatten().map(|c| json::certificate(sub, &c));
    let pure_point = optional(spectral_verdict(sub))?.map(|v| v.pure_point);
    let level = match a.level {
        LevelArg::Sigma => Level::Sigma,
        LevelArg::Kolakoski => Level::Kolakoski,
    };
    let spectrum = spectrum_report(params, level)?;
    Ok(json!({
        "config": echo,
        "kind": d.kind.as_str(),
        "substitution": text,
        "length": sub.constant_length(),
        "height": h.as_ref().map(|h| h.h),
        "gcd": h.as_ref().map(|h| h.g),
        "coincidence": coincidence,
        "pure_point": pure_point,
        "spectrum": { "primes": spectrum.ladic_part, "cyclic_order": spectrum.cyclic_factor_order },
    }))
}

fn matrix_json(sub: &Substitution, c: &CoincidenceMatrix) -> Value {
    json!({ "pairs": c.pair_labels(sub), "rows": c.matrix.rows() })
}

/// Height, coincidences, `C`, the spectral verdict and the spectrum for the
/// height-one substitution of `(m, n)`.
fn analysis(params: EvenParams) -> Result<Value> {
    let d = height_one_substitution(params)?;
    let sub = &d.sub;
    let ell = params.ell();
    let h = height(sub)?;
    let full = full_coincidence(sub)?.ok_or_else(|| Error::Inconsistent("height one but no coincidence".into()))?;
    let minimal = minimal_coincidence(sub)?;
    let c = coincidence_matrix(sub)?;
    let verdict = spectral_verdict(sub)?;
    let spectrum = spectrum_report(params, Level::Kolakoski)?;
    let sigma = spectrum_report(params, Level::Sigma)?;
    let model = cut_project_descriptor(params);
    let freqs: Vec<Value> = letter_frequencies(sub)?.iter().map(json::rational).collect();
    Ok(json!({
        "params": { "m": params.m, "n": params.n, "p": 2 * params.m, "q": 2 * params.n, "ell": ell },
        "kind": d.kind.as_str(),
        "substitution": sub.to_json(),
        "length": ell,
        "height": h.h,
        "gcd": h.g,
        "coincidence": json::certificate(sub, &full),
        "minimal_coincidence": minimal.map(|m| json::certificate(sub, &m)),
        "coincidence_matrix": matrix_json(sub, &c),
        "char_poly": verdict.char_poly.to_string(),
        "multiplicity": verdict.multiplicity,
        "positive_column": verdict.positive_column.map(|(k, col)| json!({ "power": k, "pair": c.pair_labels(sub)[col] })),
        "pure_point": verdict.pure_point,
        "frequencies": freqs,
        "spectrum": { "primes": spectrum.ladic_part, "cyclic": spectrum.cyclic_factor_order, "group": spectrum.to_string() },
        "sigma_spectrum": { "primes": sigma.ladic_part, "cyclic": sigma.cyclic_factor_order, "group": sigma.to_string() },
        "model_set": { "physical": model.physical, "internal": model.internal, "lattice": model.lattice },
        "bragg_support": bragg_support(params).description,
    }))
}

fn load_substitution(path: &Path) -> Result<Substitution> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let sub = if text.trim_start().starts_with('{') {
        let j = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        Substitution::from_json(&j)?
    } else {
        Substitution::from_text(&text)?
    };
    Ok(sub)
}

fn source(m: Option<u32>, n: Option<u32>, file: Option<&Path>) -> Result<Substitution> {
    match (m, n, file) {
        (Some(m), Some(n), None) => Ok(height_one_substitution(EvenParams::new(m, n)?)?.sub),
        (None, None, Some(path)) => load_substitution(path),
        _ => Err(usage("give either --m and --n or --substitution")),
    }
}

fn decomposition_json(d: &CosetDecomposition) -> Value {
    json!({
        "letter": d.label,
        "ell": d.ell,
        "depth": d.depth,
        "cosets": d.cosets.iter().map(json::coset).collect::<Vec<_>>(),
        "covered_density": json::rational(&d.covered_density),
        "residual": json::rational(&d.residual_density),
        "frequency": json::rational(&d.frequency),
    })
}

fn cosets(a: &CosetsArgs, echo: Value) -> Result<Value> {
    let sub = source(a.m, a.n, a.substitution.as_deref())?;
    let letter = sub.letter(&a.letter)?;
    let d = coset_decomposition(&sub, letter, a.depth)?;
    if let Some(path) = &a.csv {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
        w.write_record(["modulus", "residue"])?;
        for c in &d.cosets {
            w.write_record([c.modulus().to_string(), c.residue.to_string()])?;
        }
        w.flush()?;
    }
    let mut doc = json!({ "config": echo });
    merge(&mut doc, decomposition_json(&d));
    Ok(doc)
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || usage(format!("weight {s:?} is not of the form re,im"));
    let (re, im) = s.split_once(',').ok_or_else(bad)?;
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

fn diffract(a: &DiffractArgs, echo: Value) -> Result<Value> {
    let params = EvenParams::new(a.m, a.n)?;
    let (cp, cq) = (parse_complex(&a.cp)?, parse_complex(&a.cq)?);
    let peaks = diffraction_spectrum(params, cp, cq, a.depth, a.max_denom)?;
    let values = if a.oracle_n > 0 { kolakoski_prefix(params.kol(), a.oracle_n)? } else { Vec::new() };
    let mut rows = Vec::with_capacity(peaks.len());
    let mut out = Vec::with_capacity(peaks.len());
    for k in &peaks {
        let p = &k.peak;
        let oracle = (a.oracle_n > 0).then(|| {
            let est = kolakoski_exponential_sum(&values, 2 * params.m, cp, cq, p.frequency());
            (est, (est - p.amplitude).norm())
        });
        rows.push((p.frequency(), p.amplitude, p.intensity, p.truncation_error, oracle));
        out.push(json!({
            "frequency": json::rational64(p.frequency()),
            "block_frequency": json::rational64(Rational64::new(k.block_frequency.0, k.block_frequency.1)),
            "amplitude": json::complex(p.amplitude),
            "intensity": p.intensity,
            "error_bound": p.truncation_error,
            "oracle": oracle.map(|(est, delta)| json!({ "estimate": json::complex(est), "delta": delta })),
        }));
    }
    if let Some(path) = &a.csv {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
        w.write_record(["num", "den", "re", "im", "intensity", "error_bound", "oracle_delta"])?;
        for (f, amp, intensity, err, oracle) in rows {
            w.write_record([
                f.numer().to_string(),
                f.denom().to_string(),
                json::clean(amp.re).to_string(),
                json::clean(amp.im).to_string(),
                intensity.to_string(),
                err.to_string(),
                oracle.map(|(_, d)| d.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
    }
    Ok(json!({ "config": echo, "peaks": out }))
}

fn parse_fraction(s: &str) -> Result<Rational64> {
    let bad = || usage(format!("contraction {s:?} is not a fraction like 3/10"));
    let (num, den) = s.split_once('/').unwrap_or((s, "1"));
    let num: i64 = num.trim().parse().map_err(|_| bad())?;
    let den: i64 = den.trim().parse().map_err(|_| bad())?;
    if den == 0 {
        return Err(bad());
    }
    Ok(Rational64::new(num, den))
}

fn visualize(a: &VisualizeArgs, config: &RunConfig) -> Result<String> {
    let sub = source(a.m, a.n, a.substitution.as_deref())?;
    let ell = sub.constant_length().ok_or(Error::NotConstantLength)? as u64;
    let dimension = if a.dimension == 1 { Dimension::One } else { Dimension::Two };
    let spec = match &a.contraction {
        Some(c) => EmbeddingSpec::new(dimension, ell, parse_fraction(c)?)?,
        None => EmbeddingSpec::default_for(dimension, ell)?,
    };
    let colors = match &a.colors {
        Some(list) => ColorMap::new(list.split(',').map(|c| c.trim().to_string()).collect(), a.mixed_color.clone())?,
        None => {
            let mut greys = ColorMap::greys(sub.size())?;
            greys.mixed = a.mixed_color.clone();
            ColorMap::new(greys.letters, greys.mixed)?
        }
    };
    let pic = render(&sub, a.depth, &spec, &colors)?;
    Ok(pic.to_svg(Some(&svg_comment(config))))
}

/// Deepest level with at most `3^10` residues, so every `ℓ` costs about
/// the same.
fn peak_depth(params: EvenParams, floor: u32) -> u32 {
    let ell = params.ell() as u64;
    let mut d = 1;
    while ell.pow(d + 1) <= 3u64.pow(10) {
        d += 1;
    }
    d.max(floor)
}

fn report(a: &ReportArgs, echo: Value) -> Result<Value> {
    let params = EvenParams::new(a.m, a.n)?;
    let d = height_one_substitution(params)?;
    let sub = &d.sub;
    let c = coincidence_matrix(sub)?;
    let square = c.matrix.checked_mul(&c.matrix).ok_or_else(|| Error::Inconsistent("C^2 overflows".into()))?;
    let partition = coset_partition(sub, a.depth)?;
    let support = effective_support_gcd(sub, (params.ell() as usize).pow(6))?;
    let peaks = diffraction_spectrum(
        params,
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        peak_depth(params, a.depth),
        1,
    )?;
    let mut doc = json!({ "config": echo });
    merge(&mut doc, analysis(params)?);
    merge(
        &mut doc,
        json!({
            "rules": sub.to_text(),
            "coincidence_matrix_squared": square.rows(),
            "ifs": ifs_system(sub)?.render(sub).lines().collect::<Vec<_>>(),
            "cosets": partition.letters.iter().map(|d| {
                let mut v = decomposition_json(d);
                merge(&mut v, json!({ "printed": d.cosets.iter().map(ToString::to_string).collect::<Vec<_>>() }));
                v
            }).collect::<Vec<_>>(),
            "open_residues": partition.open.len(),
            "support_gcd": { "gcds": support.gcds, "refined": support.refined },
            "peaks": peaks.iter().map(|k| json!({
                "frequency": json::rational64(k.peak.frequency()),
                "amplitude": json::complex(k.peak.amplitude),
                "intensity": k.peak.intensity,
                "error_bound": k.peak.truncation_error,
            })).collect::<Vec<_>>(),
        }),
    );
    Ok(doc)
}
