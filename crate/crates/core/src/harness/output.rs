//! Artifact writers. File names embed the scenario hash so that runs of
//! different scenarios can share an output directory.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use super::run::{RunMetrics, RunRecord, StrategyRow, SweepKind, SweepRow};
use crate::geometry::RoiGrid;
use crate::linalg::CVector;
use crate::operator::{MeasurementSet, Measurements};
use crate::reconstruction::DoaPeak;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub field_csv: PathBuf,
    pub field_pgm: PathBuf,
    pub spectrum_csv: PathBuf,
    pub metrics_json: PathBuf,
    pub scenario_toml: PathBuf,
}

#[derive(Serialize)]
struct Summary<'a> {
    scenario_hash: &'a str,
    version: &'a str,
    metrics: &'a RunMetrics,
    rank_bound: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    peaks: Option<&'a [DoaPeak]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    peaks_complete: Option<bool>,
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

fn finish_csv(path: &Path, header: Option<String>, w: csv::Writer<Vec<u8>>) -> Result<()> {
    let body = w.into_inner().map_err(|e| Error::io(path, e.into_error()))?;
    let mut out = Vec::with_capacity(body.len() + 128);
    if let Some(h) = header {
        out.extend_from_slice(h.as_bytes());
        out.push(b'\n');
    }
    out.extend_from_slice(&body);
    write(path, &out)
}

/// Field grid as CSV (row-major, `x,y,re,im,abs`), graymap of `|Ê|`,
/// singular values, metrics summary and the canonical scenario.
///
/// Angular RoIs write `x = θ`, `y = φ` of each grid direction.
pub fn emit_outputs(rec: &RunRecord, out_dir: &Path) -> Result<Artifacts> {
    ensure_dir(out_dir)?;
    let tag = &rec.hash[..12];
    let paths = Artifacts {
        field_csv: out_dir.join(format!("field_{tag}.csv")),
        field_pgm: out_dir.join(format!("field_{tag}.pgm")),
        spectrum_csv: out_dir.join(format!("spectrum_{tag}.csv")),
        metrics_json: out_dir.join(format!("metrics_{tag}.json")),
        scenario_toml: out_dir.join(format!("scenario_{tag}.toml")),
    };

    let (header, coords, width, height): (String, Vec<(f64, f64)>, usize, usize) = match rec.roi.grid() {
        RoiGrid::Cartesian(g) => (
            format!(
                "# grid=cartesian origin={},{} pixel={},{} counts={},{} z={} hash={}",
                g.origin[0], g.origin[1], g.pixel[0], g.pixel[1], g.counts[0], g.counts[1], g.z, rec.hash
            ),
            g.centers().iter().map(|p| (p.x, p.y)).collect(),
            g.counts[0],
            g.counts[1],
        ),
        RoiGrid::Angular(dirs) => (
            format!("# grid=angular points={} units=rad hash={}", dirs.len(), rec.hash),
            dirs.iter().map(|d| (d.theta(), d.phi())).collect(),
            dirs.len(),
            1,
        ),
    };
    let mut w = csv_writer();
    w.write_record(["x", "y", "re", "im", "abs"])?;
    for ((x, y), z) in coords.iter().zip(rec.estimate.iter()) {
        w.write_record([x.to_string(), y.to_string(), z.re.to_string(), z.im.to_string(), z.norm().to_string()])?;
    }
    finish_csv(&paths.field_csv, Some(header), w)?;

    write(&paths.field_pgm, &graymap(&rec.estimate, width, height))?;

    let mut w = csv_writer();
    w.write_record(["index", "sigma"])?;
    for (i, s) in rec.spectrum.singular_values.iter().enumerate() {
        w.write_record([i.to_string(), s.to_string()])?;
    }
    finish_csv(&paths.spectrum_csv, None, w)?;

    let summary = Summary {
        scenario_hash: &rec.hash,
        version: rec.version,
        metrics: &rec.metrics,
        rank_bound: rec.spectrum.rank_bound,
        peaks: rec.doa.as_ref().map(|d| d.peaks.as_slice()),
        peaks_complete: rec.doa.as_ref().map(|d| d.complete),
    };
    let mut json = serde_json::to_string_pretty(&summary).map_err(|e| Error::Parse(e.to_string()))?;
    json.push('\n');
    write(&paths.metrics_json, json.as_bytes())?;
    write(&paths.scenario_toml, rec.scenario.canonical().as_bytes())?;
    Ok(paths)
}

/// Binary graymap (P5) of `|v|` scaled to the maximum, `height` rows of
/// `width` pixels in index order.
pub fn graymap(v: &CVector, width: usize, height: usize) -> Vec<u8> {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend(v.iter().map(|z| {
        if max > 0.0 {
            (z.norm() / max * 255.0).round() as u8
        } else {
            0
        }
    }));
    out
}

/// One summary row per sweep point.
pub fn emit_sweep(rows: &[SweepRow], kind: SweepKind, hash: &str, out_dir: &Path) -> Result<PathBuf> {
    ensure_dir(out_dir)?;
    let path = out_dir.join(format!("sweep_{}_{}.csv", kind.name(), &hash[..12]));
    let mut w = csv_writer();
    for r in rows {
        w.serialize(r)?;
    }
    finish_csv(&path, None, w)?;
    Ok(path)
}

/// One row per deployment strategy.
pub fn emit_strategy_table(rows: &[StrategyRow], hash: &str, out_dir: &Path) -> Result<PathBuf> {
    ensure_dir(out_dir)?;
    let path = out_dir.join(format!("sweep_strategy_{}.csv", &hash[..12]));
    let mut w = csv_writer();
    for r in rows {
        w.serialize(r)?;
    }
    finish_csv(&path, None, w)?;
    Ok(path)
}

/// `index,re,im,abs` for phased data, `index,abs` for magnitudes.
pub fn write_measurements_csv(meas: &MeasurementSet, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    let mut w = csv_writer();
    match &meas.values {
        Measurements::Phased(v) => {
            w.write_record(["index", "re", "im", "abs"])?;
            for (i, z) in v.iter().enumerate() {
                w.write_record([i.to_string(), z.re.to_string(), z.im.to_string(), z.norm().to_string()])?;
            }
        }
        Measurements::Magnitude(v) => {
            w.write_record(["index", "abs"])?;
            for (i, a) in v.iter().enumerate() {
                w.write_record([i.to_string(), a.to_string()])?;
            }
        }
    }
    let header = format!(
        "# operator={} noise_variance={} noise_seed={}",
        meas.operator_id, meas.noise.variance, meas.noise.seed
    );
    finish_csv(path, Some(header), w)
}

/// Reads a measurement CSV. Columns `re` and `im` give phased data; a lone
/// `abs` column gives magnitudes. Lines starting with `#` are skipped and
/// rows must be in index order.
pub fn read_measurements_csv(path: &Path) -> Result<Measurements> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = r.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let parse = |rec: &csv::StringRecord, i: usize, line: usize| -> Result<f64> {
        rec.get(i)
            .ok_or_else(|| Error::Parse(format!("{}: row {line}: missing column", path.display())))?
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("{}: row {line}: {e}", path.display())))
    };
    let (re, im, abs) = (col("re"), col("im"), col("abs"));
    let mut phased = Vec::new();
    let mut mags = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        match (re, im, abs) {
            (Some(a), Some(b), _) => phased.push(Complex64::new(parse(&rec, a, line)?, parse(&rec, b, line)?)),
            (_, _, Some(c)) => mags.push(parse(&rec, c, line)?),
            _ => {
                return Err(Error::Parse(format!(
                    "{}: expected columns re,im or abs",
                    path.display()
                )))
            }
        }
    }
    if re.is_some() && im.is_some() {
        Ok(Measurements::Phased(CVector::from_vec(phased)))
    } else {
        Ok(Measurements::Magnitude(mags))
    }
}
