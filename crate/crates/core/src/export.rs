//! JSON and CSV writers for reports and traces.
//!
//! JSON floats carry 17 significant digits so values round-trip; CSV uses 12.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};

use crate::rate::RateReport;
use crate::sim::TrajectoryTrace;

struct RoundTripFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for RoundTripFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        write!(w, "{:.16e}", value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with every float written as `{:.16e}`.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, RoundTripFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

fn num(x: f64) -> String {
    format!("{x:.11e}")
}

/// `t,err,x_0..,xstar_0..` (iterates in original coordinates).
pub fn write_trace_csv<W: Write>(mut w: W, trace: &TrajectoryTrace) -> io::Result<()> {
    let p = trace.optima.first().map_or(0, |v| v.len());
    let mut header = vec!["t".to_string(), "err".to_string()];
    header.extend((0..p).map(|i| format!("x_{i}")));
    header.extend((0..p).map(|i| format!("xstar_{i}")));
    writeln!(w, "{}", header.join(","))?;
    let xs = trace.original_iterates();
    for (t, ((x, s), e)) in xs.iter().zip(&trace.optima).zip(&trace.errors).enumerate() {
        let mut row = vec![t.to_string(), num(*e)];
        row.extend(x.iter().map(|&v| num(v)));
        row.extend(s.iter().map(|&v| num(v)));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// `lambda,spectral_radius`.
pub fn write_rate_samples_csv<W: Write>(mut w: W, report: &RateReport) -> io::Result<()> {
    writeln!(w, "lambda,spectral_radius")?;
    for s in &report.samples {
        writeln!(w, "{},{}", num(s.lambda), num(s.spectral_radius))?;
    }
    Ok(())
}

/// `t,xstar_*,x_<alg>_*,err_<alg>` for several runs over one trajectory.
/// Rows stop at the shortest trace.
pub fn write_compare_csv<W: Write>(mut w: W, runs: &[(String, TrajectoryTrace)]) -> io::Result<()> {
    let Some((_, first)) = runs.first() else {
        return writeln!(w, "t");
    };
    let p = first.optima.first().map_or(0, |v| v.len());
    let mut header = vec!["t".to_string()];
    header.extend((0..p).map(|i| format!("xstar_{i}")));
    for (name, _) in runs {
        header.extend((0..p).map(|i| format!("x_{name}_{i}")));
        header.push(format!("err_{name}"));
    }
    writeln!(w, "{}", header.join(","))?;
    let originals: Vec<Vec<Vec<f64>>> = runs.iter().map(|(_, tr)| tr.original_iterates()).collect();
    let len = runs.iter().map(|(_, tr)| tr.errors.len()).min().unwrap_or(0);
    for t in 0..len {
        let mut row = vec![t.to_string()];
        row.extend(first.optima[t].iter().map(|&v| num(v)));
        for ((_, tr), xs) in runs.iter().zip(&originals) {
            row.extend(xs[t].iter().map(|&v| num(v)));
            row.push(num(tr.errors[t]));
        }
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
