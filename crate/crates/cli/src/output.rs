//! CSV traces, coupling tables and gnuplot scripts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use qdyn_core::dynamics::PopulationTrace;

use crate::error::{CliError, Result};

/// Shortest decimal that parses back to the same f64, with integral values
/// written without a fractional part.
pub fn format_float(v: f64) -> String {
    let s = format!("{v:?}");
    match s.strip_suffix(".0") {
        Some(int) => int.to_string(),
        None => s,
    }
}

pub fn trace_header(levels: usize) -> String {
    let mut h = String::from("t");
    for n in 0..levels {
        let _ = write!(h, ",re_a{n},im_a{n},p{n}");
    }
    h.push_str(",norm");
    h
}

/// Header plus one row per sample, newline-terminated. Refuses an empty
/// trace.
pub fn trace_csv(trace: &PopulationTrace) -> Option<String> {
    if trace.is_empty() {
        return None;
    }
    let mut out = trace_header(trace.levels());
    out.push('\n');
    for ((t, a), norm) in trace.times.iter().zip(&trace.amplitudes).zip(&trace.norms) {
        out.push_str(&format_float(*t));
        for z in &a.0 {
            let _ = write!(out, ",{},{},{}", format_float(z.re), format_float(z.im), format_float(z.norm_sqr()));
        }
        let _ = writeln!(out, ",{}", format_float(*norm));
    }
    Some(out)
}

pub fn write_trace_csv(trace: &PopulationTrace, path: &Path) -> Result<()> {
    let text = trace_csv(trace).ok_or_else(|| CliError::EmptyTrace(path.to_path_buf()))?;
    write_file(path, &text)
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// `t,max_population_deviation` rows for a comparison run.
pub fn deviation_csv(times: &[f64], deviations: &[f64]) -> String {
    let mut out = String::from("t,max_population_deviation\n");
    for (t, d) in times.iter().zip(deviations) {
        let _ = writeln!(out, "{},{}", format_float(*t), format_float(*d));
    }
    out
}

/// `n,f_n` rows.
pub fn couplings_csv(couplings: &[f64]) -> String {
    let mut out = String::from("n,f_n\n");
    for (k, f) in couplings.iter().enumerate() {
        let _ = writeln!(out, "{},{}", k + 1, format_float(*f));
    }
    out
}

/// Gnuplot script plotting every population and the norm from `csv`.
pub fn plot_script(csv: &Path, levels: usize, title: &str) -> String {
    let name = csv.display().to_string().replace('\'', "\\'");
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key autotitle columnhead outside right");
    let _ = writeln!(s, "set title '{}'", title.replace('\'', "\\'"));
    let _ = writeln!(s, "set xlabel 't'");
    let _ = writeln!(s, "set ylabel 'population'");
    let mut parts = Vec::with_capacity(levels + 1);
    for n in 0..levels {
        parts.push(format!("'{name}' using 1:{} with lines", 4 + 3 * n));
    }
    parts.push(format!("'{name}' using 1:{} with lines dashtype 2", 3 * levels + 2));
    let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
    s
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;
    use qdyn_core::dynamics::AmplitudeVector;

    use super::*;

    fn trace(samples: Vec<(f64, Vec<Complex64>)>) -> PopulationTrace {
        let mut tr = PopulationTrace {
            times: Vec::new(),
            amplitudes: Vec::new(),
            populations: Vec::new(),
            norms: Vec::new(),
            drift_record: Vec::new(),
            max_norm_drift: 0.0,
            failed: false,
            steps_taken: 0,
        };
        for (t, a) in samples {
            let a = AmplitudeVector(a);
            tr.times.push(t);
            tr.populations.push(a.populations());
            tr.norms.push(a.norm());
            tr.drift_record.push(0.0);
            tr.amplitudes.push(a);
        }
        tr
    }

    #[test]
    fn two_level_initial_row() {
        let tr = trace(vec![(0.0, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])]);
        let csv = trace_csv(&tr).unwrap();
        assert_eq!(csv, "t,re_a0,im_a0,p0,re_a1,im_a1,p1,norm\n0,1,0,1,0,0,0,1\n");
    }

    #[test]
    fn empty_trace_is_refused() {
        assert!(trace_csv(&trace(Vec::new())).is_none());
        let err = write_trace_csv(&trace(Vec::new()), Path::new("never.csv")).unwrap_err();
        assert!(matches!(err, CliError::EmptyTrace(_)));
    }

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, 1e16, 123456789.0, f64::MIN_POSITIVE] {
            let s = format_float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(format_float(2.0), "2");
        assert_eq!(format_float(0.5), "0.5");
    }

    #[test]
    fn plot_script_columns() {
        let s = plot_script(Path::new("out/trace.csv"), 3, "demo");
        assert!(s.contains("using 1:4 ") && s.contains("using 1:7 ") && s.contains("using 1:10 ") && s.contains("using 1:11 "));
        assert!(s.contains("'out/trace.csv'"));
    }
}
