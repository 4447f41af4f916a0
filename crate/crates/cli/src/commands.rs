use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use concordia_core::copula::{diagonal, opposite_diagonal, PiecewiseLinear};
use concordia_core::measures::{all_measures, region_triple, MEASURE_NAMES};
use concordia_core::oracle::{cb_measures, checkerboard_of, mc_measures};
use concordia_core::region::{self, classify, contains, tau_bound_faces, tau_bounds_with_tol, RegionPoint, Status};
use concordia_core::synthesis::attain_with_tol;
use concordia_core::{CopulaExpr, Scalar};
use serde_json::{json, Value};

use crate::error::{CliError, Result};
use crate::{Format, Mode, PlotKind};

/// Round-trip tolerance for the synthesis verification block.
const VERIFY_TOL: f64 = 1e-9;

fn read_expr(path: &Path) -> Result<CopulaExpr> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    CopulaExpr::from_json_str(&text).map_err(|e| CliError::from_expr(path.to_path_buf(), e))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}

fn json_line(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("values serialize")
}

pub fn measures(path: &Path, mode: Mode) -> Result<String> {
    let expr = read_expr(path)?;
    let v = match mode {
        Mode::Exact => to_value(&all_measures(&expr)),
        Mode::Checkerboard(n) => to_value(&cb_measures(&checkerboard_of(&expr, n)?)),
        Mode::MonteCarlo { samples, seed } => to_value(&mc_measures(&expr, samples, seed)?),
    };
    Ok(json_line(&v))
}

/// A point is exact only when every coordinate is; mixed input is promoted
/// to float so the output has one arithmetic mode.
fn promote(coords: [Scalar; 3]) -> [Scalar; 3] {
    if coords.iter().all(Scalar::is_exact) {
        coords
    } else {
        coords.map(|c| c.to_float())
    }
}

fn point_json(p: &RegionPoint) -> Value {
    json!({ "phi": p.phi, "gamma": p.gamma, "tau": p.tau })
}

pub fn region_check(phi: Scalar, gamma: Scalar, tau: Scalar, tol: f64) -> Result<String> {
    let [phi, gamma, tau] = promote([phi, gamma, tau]);
    let p = RegionPoint::new(phi, gamma, tau);
    let c = contains(&p, tol);
    let echo = |x: &Scalar| if p.is_exact() { x.clone() } else { x.to_float() };
    let location = match c.status {
        Status::Outside => Value::Null,
        _ => Value::String(classify(&p, tol)?.location.to_string()),
    };
    Ok(json_line(&json!({
        "point": point_json(&p),
        "status": c.status,
        "location": location,
        "active": c.active.iter().map(|f| json!({ "face": f, "constraint": f.constraint() })).collect::<Vec<_>>(),
        "violated": c.violated.iter().map(|v| json!({ "face": v.face, "constraint": v.constraint, "lhs": echo(&v.lhs) })).collect::<Vec<_>>(),
    })))
}

pub fn region_bounds(phi: Scalar, gamma: Scalar, tol: f64) -> Result<String> {
    let [phi, gamma, _] = promote([phi, gamma, Scalar::zero()]);
    let (lo, hi) = tau_bounds_with_tol(&phi, &gamma, tol)?;
    let (lo_face, hi_face) = tau_bound_faces(&phi, &gamma);
    Ok(json_line(&json!({
        "phi": phi,
        "gamma": gamma,
        "tau": [lo, hi],
        "faces": [lo_face, hi_face],
    })))
}

fn mesh(format: Format) -> String {
    match format {
        Format::Obj => region::mesh_obj(),
        Format::Json | Format::Csv => json_line(&region::mesh_json()),
    }
}

pub fn region_export(format: Format, out: Option<&Path>) -> Result<String> {
    if format == Format::Csv {
        return Err(CliError::Argument { what: "mesh format (json or obj)", text: "csv".into() });
    }
    let text = mesh(format);
    match out {
        Some(path) => {
            write_file(path, &text)?;
            eprintln!("wrote {}", path.display());
            Ok(String::new())
        }
        None => Ok(text),
    }
}

pub fn synthesize(phi: Scalar, gamma: Scalar, tau: Scalar, out: Option<&Path>, tol: f64) -> Result<String> {
    let [phi, gamma, tau] = promote([phi, gamma, tau]);
    let target = RegionPoint::new(phi, gamma, tau);
    let res = attain_with_tol(&target, tol)?;
    let text = res.expr.to_json_string();
    // the check re-reads what was persisted, not the in-memory value
    let reread = match out {
        Some(path) => {
            write_file(path, &text)?;
            eprintln!("wrote {}", path.display());
            read_expr(path)?
        }
        None => CopulaExpr::from_json_str(&text).map_err(|e| CliError::from_expr(PathBuf::from("<output>"), e))?,
    };
    let [p, g, t] = region_triple(&reread)?;
    let recomputed = RegionPoint::new(p, g, t);
    let residual = recomputed.max_abs_diff(&target);
    let mut v = to_value(&res);
    v["verification"] = json!({
        "source": out.map_or_else(|| "<output>".to_string(), |p| p.display().to_string()),
        "recomputed": point_json(&recomputed),
        "residual": residual,
        "matches": residual.to_f64() <= VERIFY_TOL.max(tol),
    });
    Ok(json_line(&v))
}

pub fn oracle_compare(path: &Path, n: usize, samples: usize, seed: u64, format: Format) -> Result<String> {
    let expr = read_expr(path)?;
    let exact = all_measures(&expr);
    let cb = cb_measures(&checkerboard_of(&expr, n)?).to_f64();
    let mc = mc_measures(&expr, samples, seed)?;
    let exact_flags = to_value(&exact.exact);
    let rows: Vec<Value> = MEASURE_NAMES
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let x = exact.get(name).expect("known measure");
            let est = mc.get(name).expect("known measure");
            let z = if est.stderr > 0.0 { (est.value - x.to_f64()) / est.stderr } else { 0.0 };
            json!({
                "measure": name,
                "exact": x,
                "closed_form": exact_flags[*name],
                "checkerboard": cb[k],
                "checkerboard_error": cb[k] - x.to_f64(),
                "mc": est.value,
                "mc_stderr": est.stderr,
                "mc_z": z,
            })
        })
        .collect();
    match format {
        Format::Csv => {
            let mut s = String::from("measure,exact,closed_form,checkerboard,checkerboard_error,mc,mc_stderr,mc_z\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    r["measure"].as_str().unwrap_or_default(),
                    exact.get(r["measure"].as_str().unwrap_or_default()).map_or(f64::NAN, Scalar::to_f64),
                    r["closed_form"],
                    r["checkerboard"],
                    r["checkerboard_error"],
                    r["mc"],
                    r["mc_stderr"],
                    r["mc_z"],
                );
            }
            Ok(s)
        }
        Format::Json => Ok(json_line(&json!({ "n": n, "samples": samples, "seed": seed, "rows": rows }))),
        Format::Obj => Err(CliError::Argument { what: "comparison format (json or csv)", text: "obj".into() }),
    }
}

fn section_output(f: &PiecewiseLinear, format: Format) -> String {
    match format {
        Format::Json => json_line(&json!({ "breakpoints": f.breakpoints(), "values": f.values() })),
        _ => {
            let mut s = String::from("t,value\n");
            for (t, v) in f.breakpoints().iter().zip(f.values()) {
                let _ = writeln!(s, "{},{}", t.to_f64(), v.to_f64());
            }
            s
        }
    }
}

/// Support segments of the normal form; `mass` is the x-projection, which is
/// the segment length divided by √2.
fn mass_output(expr: &CopulaExpr, format: Format) -> Result<String> {
    let sh = expr.as_shuffle()?;
    let segs: Vec<[Scalar; 5]> = sh
        .pieces()
        .iter()
        .map(|p| {
            let ((x0, y0), (x1, y1)) = p.endpoints();
            [x0, y0, x1, y1, p.width()]
        })
        .collect();
    Ok(match format {
        Format::Json => json_line(&json!({
            "segments": segs.iter().map(|[x0, y0, x1, y1, m]| json!({ "x0": x0, "y0": y0, "x1": x1, "y1": y1, "mass": m })).collect::<Vec<_>>()
        })),
        _ => {
            let mut s = String::from("x0,y0,x1,y1,mass\n");
            for seg in &segs {
                let [x0, y0, x1, y1, m] = seg.clone().map(|c| c.to_f64());
                let _ = writeln!(s, "{x0},{y0},{x1},{y1},{m}");
            }
            s
        }
    })
}

pub fn plot(path: Option<&Path>, what: PlotKind, format: Option<Format>) -> Result<String> {
    if what == PlotKind::Polyhedron {
        return Ok(mesh(format.unwrap_or(Format::Json)));
    }
    let format = format.unwrap_or(Format::Csv);
    if format == Format::Obj {
        return Err(CliError::Argument { what: "plot format (csv or json)", text: "obj".into() });
    }
    let path = path.ok_or(CliError::Argument { what: "expression file", text: String::new() })?;
    let expr = read_expr(path)?;
    match what {
        PlotKind::Mass => mass_output(&expr, format),
        PlotKind::Diag => Ok(section_output(&diagonal(&expr)?, format)),
        PlotKind::Odiag => Ok(section_output(&opposite_diagonal(&expr)?, format)),
        PlotKind::Polyhedron => unreachable!("handled above"),
    }
}
