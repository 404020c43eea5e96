//! Text export of convergence studies.

use std::fmt::Write;

use super::{ConvergenceStudy, ErrorRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    /// `h,ndof,errE,errH` rows with a `# fit` footer.
    Csv,
    /// Whitespace separated `log10` columns for gnuplot, one block per field
    /// plus the fitted lines.
    PlotData,
}

impl ExportFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            ExportFormat::Csv => "csv",
            ExportFormat::PlotData => "dat",
        }
    }
}

pub fn export(study: &ConvergenceStudy, format: ExportFormat) -> String {
    match format {
        ExportFormat::Csv => csv(study),
        ExportFormat::PlotData => plot_data(study),
    }
}

fn csv(study: &ConvergenceStudy) -> String {
    let mut s = String::from("h,ndof,errE,errH\n");
    for r in &study.records {
        let _ = writeln!(s, "{:.16e},{},{:.16e},{:.16e}", r.h, r.ndof, r.err_e, r.err_h);
    }
    if let Some(f) = &study.fit {
        let _ = writeln!(s, "# fit beta={:.16e} gamma={:.16e}", f.beta, f.gamma);
    }
    s
}

fn plot_data(study: &ConvergenceStudy) -> String {
    let mut s = format!("# {}\n", study.file_stem());
    for (name, pick) in [("E", 0usize), ("H", 1)] {
        let _ = writeln!(s, "# field {name}: log10(h) log10(err)");
        for r in &study.records {
            let e = if pick == 0 { r.err_e } else { r.err_h };
            let _ = writeln!(s, "{:.16e} {:.16e}", r.h.log10(), e.log10());
        }
        s.push_str("\n\n");
    }
    if let Some(f) = &study.fit {
        for (name, slope, icpt) in [("E", f.beta, f.intercept_e), ("H", f.gamma, f.intercept_h)] {
            let _ = writeln!(s, "# fitted {name}: slope {slope:.16e}");
            for r in &study.records {
                // intercept is in natural log units
                let y = (icpt + slope * r.h.ln()) / std::f64::consts::LN_10;
                let _ = writeln!(s, "{:.16e} {:.16e}", r.h.log10(), y);
            }
            s.push_str("\n\n");
        }
    }
    s
}

/// Reads the records back from [`ExportFormat::Csv`] output. Comment lines
/// and the header are skipped; malformed rows yield `None`.
pub fn parse_csv(text: &str) -> Option<Vec<ErrorRecord>> {
    text.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let mut it = l.split(',');
            let r = ErrorRecord {
                h: it.next()?.parse().ok()?,
                ndof: it.next()?.parse().ok()?,
                err_e: it.next()?.parse().ok()?,
                err_h: it.next()?.parse().ok()?,
            };
            it.next().is_none().then_some(r)
        })
        .collect()
}
