//! One function per subcommand: resolve defaults, run the pipeline, collect
//! the rows for the writer.

use dtn_core::dn_disk::{self, discrepancy_with_margin, DiscrepancyRow, ImRule, Medium, DEFAULT_MARGIN};
use dtn_core::output::{fmt_f64, json_f64};
use dtn_core::parametrix::{self, a10, a10_disk, b0, elliptic_residual_curve, residual_slopes, BoundaryGeometry};
use dtn_core::symbols::{classify_case, rho_j, scale, tau, tau_quotient, MediumPair};
use dtn_core::transmission::region::{check_case, fit_log_envelope, RegionOptions};
use dtn_core::transmission::weyl::counting_box;
use dtn_core::transmission::{
    free_region_check_with, scan_zeros, weyl_count_with, RegionSpec, ScanOptions, SearchBox, ZeroSet,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{DnCompareArgs, FreeRegionArgs, NumList, ParametrixArgs, ScanArgs, SymbolsArgs, WeylArgs};
use crate::svg;
use crate::CliError;

/// Everything a command hands to the writer.
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub result: Value,
    /// Written as a comment line ahead of the CSV header.
    pub summary: Option<Value>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// The run finished but something was flagged (exit 3).
    pub flagged: bool,
    /// Extra file to write: (path, contents).
    pub side_file: Option<(std::path::PathBuf, String)>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn pair_from(list: &Option<NumList>) -> Result<MediumPair, CliError> {
    let v = &list.as_ref().ok_or_else(|| config_err("--pair c1,n1,c2,n2 is required"))?.0;
    if v.len() != 4 {
        return Err(config_err(format!("--pair needs 4 numbers, got {}", v.len())));
    }
    MediumPair::new(v[0], v[1], v[2], v[3]).map_err(|e| config_err(e.to_string()))
}

fn box_from(name: &str, list: &NumList) -> Result<SearchBox, CliError> {
    let v = &list.0;
    if v.len() != 4 {
        return Err(config_err(format!("--{name} needs re_min,re_max,im_min,im_max")));
    }
    SearchBox::new(v[0], v[1], v[2], v[3]).map_err(|e| config_err(e.to_string()))
}

fn pair_json(p: &MediumPair) -> Value {
    json!({"c1": json_f64(p.c1), "n1": json_f64(p.n1), "c2": json_f64(p.c2), "n2": json_f64(p.n2)})
}

fn floats(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| json_f64(x)).collect())
}

fn strings(h: &[&str]) -> Vec<String> {
    h.iter().map(|s| s.to_string()).collect()
}

fn in_window(v: f64, lo: f64, hi: f64) -> bool {
    v >= lo && v <= hi
}

// ---------------------------------------------------------------- dn-compare

fn parse_im_rule(s: &str) -> Result<ImRule, CliError> {
    let bad = || config_err(format!("--im-rule '{s}': expected sqrt, fixed:V or power:EPS"));
    if s == "sqrt" {
        return Ok(ImRule::Power { eps: 0.5 });
    }
    let (kind, value) = s.split_once(':').ok_or_else(bad)?;
    let value: f64 = value.trim().parse().map_err(|_| bad())?;
    if !value.is_finite() {
        return Err(bad());
    }
    match kind {
        "fixed" => Ok(ImRule::Fixed(value)),
        "power" => Ok(ImRule::Power { eps: value }),
        _ => Err(bad()),
    }
}

fn discrepancy_json(r: &DiscrepancyRow) -> Value {
    json!({
        "re_lambda": json_f64(r.lambda.re),
        "im_lambda": json_f64(r.lambda.im),
        "sup": json_f64(r.sup_discrepancy),
        "sup_over_abs_lambda": json_f64(r.sup_over_abs_lambda()),
        "weighted_sup": json_f64(r.weighted_sup),
        "argmax_mode": r.argmax_mode,
        "mode_cap": r.mode_cap,
        "tail_bound": json_f64(r.tail_bound),
        "flags": r.flags,
    })
}

pub fn dn_compare(args: &DnCompareArgs) -> Result<Report, CliError> {
    let re = args.re.clone().unwrap_or(NumList(vec![100.0, 200.0, 400.0, 800.0])).0;
    if re.is_empty() {
        return Err(config_err("--re grid is empty"));
    }
    let rule_text = args.im_rule.clone().unwrap_or_else(|| "sqrt".into());
    let rule = parse_im_rule(&rule_text)?;
    let margin = args.margin.unwrap_or(DEFAULT_MARGIN);
    if !(margin > 0.0 && margin.is_finite()) {
        return Err(config_err("--margin must be positive"));
    }
    let lambdas: Vec<Complex64> = re.iter().map(|&x| Complex64::new(x, rule.im_for(x))).collect();
    for l in &lambdas {
        scale(*l).map_err(|e| config_err(format!("l = {l}: {e}")))?;
    }
    let rows: Vec<DiscrepancyRow> = lambdas.par_iter().map(|&l| discrepancy_with_margin(l, margin)).collect();
    Ok(Report {
        command: "dn-compare",
        config: json!({"re": floats(&re), "im-rule": rule_text, "margin": json_f64(margin)}),
        result: json!({"rows": rows.iter().map(discrepancy_json).collect::<Vec<_>>()}),
        summary: None,
        header: strings(&dn_disk::CSV_HEADER),
        rows: rows.iter().map(dn_disk::csv_record).collect(),
        flagged: rows.iter().any(|r| r.is_flagged()),
        side_file: None,
    })
}

// ---------------------------------------------------------------- parametrix-check

pub fn parametrix_check(args: &ParametrixArgs) -> Result<Report, CliError> {
    let re = args.re.clone().unwrap_or(NumList(vec![100.0, 200.0, 400.0, 1000.0])).0;
    if re.len() < 2 {
        return Err(config_err("--re needs at least two frequencies for a slope"));
    }
    let im = args.im.unwrap_or(5.0);
    let hm = args.hm.unwrap_or(1.3);
    let (c, n) = (args.c.unwrap_or(1.0), args.n.unwrap_or(1.0));
    let medium = Medium::new(c, n).map_err(|e| config_err(e.to_string()))?;
    let lambdas: Vec<Complex64> = re.iter().map(|&x| Complex64::new(x, im)).collect();
    let theta = scale(lambdas[0]).map_err(|e| config_err(e.to_string()))?.theta;
    let rows = elliptic_residual_curve(&lambdas, hm, medium).map_err(|e| config_err(e.to_string()))?;
    let (without, with) = residual_slopes(&rows);
    let (without, with) = (without.unwrap_or(f64::NAN), with.unwrap_or(f64::NAN));

    // identities on the disk: b0 vanishes, a10 matches its closed form
    let n0 = n / c;
    let geom = BoundaryGeometry::disk(n0);
    let mut b0_max = 0.0f64;
    let mut a10_gap = 0.0f64;
    for i in 0..400 {
        let xi = 0.05 + 0.125 * i as f64;
        if let Ok(v) = b0(xi, &geom) {
            b0_max = b0_max.max(v.norm());
        }
        if let (Ok(x), Ok(y)) = (a10(xi, &geom, theta), a10_disk(xi, n0, theta)) {
            a10_gap = a10_gap.max((x - y).norm() / y.norm().max(1e-300));
        }
    }
    let ok = in_window(without, 0.8, 1.2) && in_window(with, 1.7, 2.3) && b0_max <= 1e-14;
    let summary = json!({
        "slope_without_a10": json_f64(without),
        "slope_with_a10": json_f64(with),
        "disk_b0_max": json_f64(b0_max),
        "a10_closed_form_rel_gap": json_f64(a10_gap),
        "slopes_in_window": ok,
    });
    let row_json: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "h": json_f64(r.h),
                "re_lambda": json_f64(r.lambda.re),
                "im_lambda": json_f64(r.lambda.im),
                "mode": r.mode,
                "resid_with_a10": json_f64(r.resid_with_a10),
                "resid_without": json_f64(r.resid_without),
                "flags": r.flags,
            })
        })
        .collect();
    Ok(Report {
        command: "parametrix-check",
        config: json!({"re": floats(&re), "im": json_f64(im), "hm": json_f64(hm), "c": json_f64(c), "n": json_f64(n)}),
        result: json!({"summary": summary.clone(), "rows": row_json}),
        summary: Some(summary),
        header: strings(&parametrix::CSV_HEADER),
        rows: rows.iter().map(parametrix::csv_record).collect(),
        flagged: !ok,
        side_file: None,
    })
}

// ---------------------------------------------------------------- scan

fn scan(pair: &MediumPair, bx: &SearchBox, m_max: Option<u32>) -> Result<ZeroSet, CliError> {
    scan_zeros(pair, bx, ScanOptions { m_max, ..ScanOptions::default() }).map_err(CliError::from)
}

pub fn scan_cmd(args: &ScanArgs) -> Result<Report, CliError> {
    let pair = pair_from(&args.pair)?;
    let bx = box_from("box", args.search_box.as_ref().ok_or_else(|| config_err("--box is required"))?)?;
    let zs = scan(&pair, &bx, args.m_max)?;
    let side_file = args.svg.as_ref().map(|p| (p.clone(), svg::heatmap(&pair, &bx, zs.m_max)));
    Ok(Report {
        command: "scan",
        config: json!({
            "pair": pair_json(&pair),
            "box": bx.to_json(),
            "m-max": zs.m_max,
            "svg": args.svg.as_ref().map(|p| p.display().to_string()),
        }),
        result: zs.to_json(None),
        summary: Some(json!({"m_max": zs.m_max, "zeros": zs.zeros.len(), "unresolved": zs.unresolved_count()})),
        header: strings(&ZeroSet::CSV_HEADER),
        rows: zs.csv_records(),
        flagged: !zs.is_clean(),
        side_file,
    })
}

// ---------------------------------------------------------------- free-region

fn region_json(r: &RegionSpec) -> Value {
    match *r {
        RegionSpec::HorizontalStrip { c } => json!({"c": json_f64(c)}),
        RegionSpec::LogCurve { a, b } => json!({"a": json_f64(a), "b": json_f64(b)}),
        RegionSpec::PowerCurve { c, eps } => json!({"c": json_f64(c), "eps": json_f64(eps)}),
    }
}

pub fn free_region(args: &FreeRegionArgs) -> Result<Report, CliError> {
    let pair = pair_from(&args.pair)?;
    let kind = args.kind.clone().ok_or_else(|| config_err("--kind strip|log|power is required"))?;
    let window = box_from("window", args.window.as_ref().unwrap_or(&NumList(vec![1.0, 40.0, 0.0, 20.0])))?;
    let slabs = args.slabs.unwrap_or(RegionOptions::default().slabs);
    if slabs == 0 {
        return Err(config_err("--slabs must be positive"));
    }
    // refuse before paying for a scan; the parameters here are placeholders
    let probe = match kind.as_str() {
        "strip" => RegionSpec::HorizontalStrip { c: 1.0 },
        "log" => RegionSpec::LogCurve { a: 0.0, b: 1.0 },
        "power" => RegionSpec::PowerCurve { c: 1.0, eps: 0.5 },
        other => return Err(config_err(format!("unknown region kind '{other}'"))),
    };
    check_case(&pair, &probe)?;

    let zs = scan(&pair, &window, args.m_max)?;
    // parameters not given are fitted from the scan: one unit above the
    // highest zero for the strip, the doubled envelope for the curves
    let (region, source) = match probe {
        RegionSpec::HorizontalStrip { .. } => match args.c {
            Some(c) => (RegionSpec::HorizontalStrip { c }, "given"),
            None => {
                let c = probe.empirical_parameter(&zs.zeros).next_up() + 1.0;
                (RegionSpec::HorizontalStrip { c }, "fitted")
            }
        },
        RegionSpec::LogCurve { .. } => match (args.a, args.b) {
            (Some(a), Some(b)) => (RegionSpec::LogCurve { a, b }, "given"),
            (None, None) => {
                let (a, b) = fit_log_envelope(&zs.zeros, 8)
                    .ok_or_else(|| CliError::Numerical("too few zeros to fit a log envelope".into()))?;
                (RegionSpec::LogCurve { a: 2.0 * a, b: 2.0 * b }, "fitted")
            }
            _ => return Err(config_err("give both --a and --b, or neither")),
        },
        RegionSpec::PowerCurve { .. } => {
            let eps = args.eps.unwrap_or(0.5);
            match args.c {
                Some(c) => (RegionSpec::PowerCurve { c, eps }, "given"),
                None => {
                    let shape = RegionSpec::PowerCurve { c: 1.0, eps };
                    let c = 2.0 * shape.empirical_parameter(&zs.zeros).next_up().max(0.5);
                    (RegionSpec::PowerCurve { c, eps }, "fitted")
                }
            }
        }
    };
    region.validate().map_err(|e| config_err(e.to_string()))?;
    let rep = free_region_check_with(&zs, &region, RegionOptions { m_max: args.m_max, slabs })?;
    let mut result = rep.to_json();
    result["parameters"] = json!(source);
    let violations = ZeroSet { zeros: rep.violations.clone(), ..zs.clone() };
    Ok(Report {
        command: "free-region",
        config: json!({
            "pair": pair_json(&pair),
            "kind": kind,
            "region": region_json(&region),
            "parameters": source,
            "window": window.to_json(),
            "m-max": rep.m_max,
            "slabs": slabs,
        }),
        summary: Some(json!({
            "case": rep.case.as_str(),
            "certified": rep.certified,
            "empirical_c": json_f64(rep.empirical_c),
            "violations": rep.violations.len(),
            "flags": rep.flags,
        })),
        result,
        header: strings(&ZeroSet::CSV_HEADER),
        rows: violations.csv_records(),
        flagged: !rep.flags.is_empty(),
        side_file: None,
    })
}

// ---------------------------------------------------------------- weyl

pub fn weyl(args: &WeylArgs) -> Result<Report, CliError> {
    let pair = pair_from(&args.pair)?;
    let radii = args.r.clone().ok_or_else(|| config_err("--r is required"))?.0;
    if radii.is_empty() {
        return Err(config_err("--r is empty"));
    }
    let r_max = radii.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let bx = counting_box(r_max).map_err(|e| config_err(e.to_string()))?;
    for &r in &radii {
        counting_box(r).map_err(|e| config_err(e.to_string()))?;
    }
    let zs = scan(&pair, &bx, None)?;
    let reports = radii.iter().map(|&r| weyl_count_with(&zs, r)).collect::<Result<Vec<_>, _>>()?;
    let flagged = reports.iter().any(|r| !r.is_exact());
    let count_max = |c: u64| if c == u64::MAX { "inf".to_string() } else { c.to_string() };
    Ok(Report {
        command: "weyl",
        config: json!({"pair": pair_json(&pair), "r": floats(&radii), "m-max": zs.m_max}),
        result: json!({
            "rows": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
            "m_max": zs.m_max,
        }),
        summary: None,
        header: strings(&["r", "count", "count_max", "prediction", "ratio"]),
        rows: reports
            .iter()
            .map(|r| vec![fmt_f64(r.r), r.count.to_string(), count_max(r.count_max), fmt_f64(r.prediction), fmt_f64(r.ratio)])
            .collect(),
        flagged,
        side_file: None,
    })
}

// ---------------------------------------------------------------- symbols

pub fn symbols(args: &SymbolsArgs) -> Result<Report, CliError> {
    let pair = pair_from(&args.pair)?;
    let xi_max = args.xi_max.unwrap_or(3.0);
    let steps = args.xi_steps.unwrap_or(60);
    let theta = args.theta.unwrap_or(0.1);
    if !(xi_max > 0.0 && xi_max.is_finite()) || steps == 0 || !theta.is_finite() {
        return Err(config_err("--xi-max must be positive, --xi-steps at least 1, --theta finite"));
    }
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let mut rows = Vec::new();
    let mut row_json = Vec::new();
    let mut faults = 0;
    for i in 0..=steps {
        let xi = xi_max * i as f64 / steps as f64;
        let r0 = xi * xi;
        let mut flags = Vec::new();
        let mut get = |name: &str, v: dtn_core::Result<Complex64>| {
            v.unwrap_or_else(|e| {
                flags.push(format!("{name}:{e}"));
                nan
            })
        };
        let rho1 = get("rho1", rho_j(r0, pair.m1(), theta));
        let rho2 = get("rho2", rho_j(r0, pair.m2(), theta));
        let t = get("tau", tau(r0, &pair, theta));
        let tq = get("tau_quotient", tau_quotient(r0, &pair, theta));
        if !flags.is_empty() {
            faults += 1;
        }
        let cols = [xi, r0, rho1.re, rho1.im, rho2.re, rho2.im, t.re, t.im, tq.re, tq.im];
        let mut row: Vec<String> = cols.iter().map(|&x| fmt_f64(x)).collect();
        row.push(flags.join(";"));
        rows.push(row);
        row_json.push(json!({
            "xi": json_f64(xi),
            "r0": json_f64(r0),
            "rho1": [json_f64(rho1.re), json_f64(rho1.im)],
            "rho2": [json_f64(rho2.re), json_f64(rho2.im)],
            "tau": [json_f64(t.re), json_f64(t.im)],
            "tau_quotient": [json_f64(tq.re), json_f64(tq.im)],
            "flags": flags,
        }));
    }
    let summary = json!({
        "case": classify_case(&pair).as_str(),
        "m1": json_f64(pair.m1()),
        "m2": json_f64(pair.m2()),
        "c_tilde": json_f64(pair.c_tilde()),
        "c0": pair.c0().map(json_f64),
    });
    Ok(Report {
        command: "symbols",
        config: json!({"pair": pair_json(&pair), "xi-max": json_f64(xi_max), "xi-steps": steps, "theta": json_f64(theta)}),
        result: json!({"summary": summary.clone(), "rows": row_json}),
        summary: Some(summary),
        header: strings(&[
            "xi", "r0", "rho1_re", "rho1_im", "rho2_re", "rho2_im", "tau_re", "tau_im", "tau_quotient_re",
            "tau_quotient_im", "flags",
        ]),
        rows,
        flagged: faults > 0,
        side_file: None,
    })
}
