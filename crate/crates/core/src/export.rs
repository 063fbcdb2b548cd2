//! CSV, JSON and OBJ writers for curve sets.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::curves::{CurveSample, CurveSet};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Obj,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Obj => "obj",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "obj" => Ok(Format::Obj),
            other => Err(Error::Parameter(format!("unknown format {other:?}"))),
        }
    }
}

pub const CSV_HEADER: &str = "x,X,Y,Z,rez1,imz1,rez2,imz2,transv,near_pole";

pub fn write_csv<W: Write>(samples: &[CurveSample], mut w: W) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for s in samples {
        let [z1, z2] = s.s3;
        let vals = [s.x, s.r3[0], s.r3[1], s.r3[2], z1.re, z1.im, z2.re, z2.im, s.transversality];
        let row: Vec<String> = vals.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(w, "{},{}", row.join(","), u8::from(s.near_pole))?;
    }
    w.flush()?;
    Ok(())
}

/// Vertices for every sample; one `l` record per maximal run of samples away
/// from the projection pole.
pub fn write_obj<W: Write>(samples: &[CurveSample], mut w: W) -> Result<()> {
    for s in samples {
        writeln!(w, "v {:.16e} {:.16e} {:.16e}", s.r3[0], s.r3[1], s.r3[2])?;
    }
    let mut run: Vec<usize> = Vec::new();
    let flush = |run: &mut Vec<usize>, w: &mut W| -> Result<()> {
        if run.len() >= 2 {
            let idx: Vec<String> = run.iter().map(|i| (i + 1).to_string()).collect();
            writeln!(w, "l {}", idx.join(" "))?;
        }
        run.clear();
        Ok(())
    };
    for (i, s) in samples.iter().enumerate() {
        if s.near_pole {
            flush(&mut run, &mut w)?;
        } else {
            run.push(i);
        }
    }
    flush(&mut run, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(curve: &CurveSet, w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, curve)?;
    Ok(())
}

pub fn export(curve: &CurveSet, format: Format, path: &Path) -> Result<()> {
    let w = BufWriter::new(File::create(path)?);
    match format {
        Format::Csv => write_csv(&curve.samples, w),
        Format::Obj => write_obj(&curve.samples, w),
        Format::Json => write_json(curve, w),
    }
}

/// Writes the companion samples in the chosen tabular format.
pub fn export_companion(curve: &CurveSet, format: Format, path: &Path) -> Result<()> {
    let set = curve
        .companion_set()
        .ok_or_else(|| Error::Parameter("curve set has no companion".into()))?;
    export(&set, format, path)
}

pub fn import_json(path: &Path) -> Result<CurveSet> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}
