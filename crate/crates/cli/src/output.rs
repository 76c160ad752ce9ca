//! CSV emission with fixed significant-digit formatting.

use std::io::Write;
use std::path::Path;

use paretoroute::experiment::ScalingRow;
use paretoroute::pareto::ParetoRecord;

use crate::CliError;

pub const SIGNIFICANT_DIGITS: usize = 9;

/// `%.9g`-style: nine significant digits, trailing zeros dropped,
/// exponent notation outside `1e-4 ..= 1e9`.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIGNIFICANT_DIGITS as i32 {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A CSV writer over a file, or stdout when `path` is `None`.
pub fn csv_writer(path: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>, CliError> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(std::fs::File::create(p).map_err(|e| CliError::io(p, e))?),
        None => Box::new(std::io::stdout()),
    };
    Ok(csv::Writer::from_writer(sink))
}

fn objective_headers(l: usize) -> Vec<String> {
    (1..=l)
        .map(|i| format!("obj_{i}"))
        .chain((1..=l).map(|i| format!("r_{i}")))
        .collect()
}

fn objective_fields(r: &ParetoRecord) -> Vec<String> {
    r.objectives.iter().chain(&r.r).map(|&v| fmt_num(v)).collect()
}

/// `bitstring, feasible, pareto_optimal, obj_*, r_*, probability`.
pub fn write_states(path: Option<&Path>, l: usize, records: &[ParetoRecord]) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["bitstring".to_string(), "feasible".into(), "pareto_optimal".into()];
    header.extend(objective_headers(l));
    header.push("probability".into());
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![r.bitstring.to_string(), r.feasible.to_string(), r.pareto_optimal.to_string()];
        row.extend(objective_fields(r));
        row.push(fmt_num(r.probability));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| CliError::io(path.unwrap_or(Path::new("-")), e))?;
    Ok(())
}

/// Aggregated sweep candidates; `pareto_optimal` is relative to the union.
pub fn write_candidates(
    path: Option<&Path>,
    l: usize,
    records: &[ParetoRecord],
    exact: &[bool],
    origins: &[Vec<usize>],
) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    let mut header = vec![
        "bitstring".to_string(),
        "feasible".into(),
        "pareto_optimal".into(),
        "exact_pareto_optimal".into(),
    ];
    header.extend(objective_headers(l));
    header.push("probability".into());
    header.push("weight_indices".into());
    w.write_record(&header)?;
    for ((r, &x), o) in records.iter().zip(exact).zip(origins) {
        let mut row = vec![
            r.bitstring.to_string(),
            r.feasible.to_string(),
            r.pareto_optimal.to_string(),
            x.to_string(),
        ];
        row.extend(objective_fields(r));
        row.push(fmt_num(r.probability));
        row.push(o.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(";"));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| CliError::io(path.unwrap_or(Path::new("-")), e))?;
    Ok(())
}

/// Exact feasible states with their decoded paths.
pub fn write_front(path: Option<&Path>, l: usize, rows: &[(ParetoRecord, String)]) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    let mut header = vec![
        "bitstring".to_string(),
        "path".into(),
        "feasible".into(),
        "pareto_optimal".into(),
    ];
    header.extend(objective_headers(l));
    w.write_record(&header)?;
    for (r, p) in rows {
        let mut row = vec![
            r.bitstring.to_string(),
            p.clone(),
            r.feasible.to_string(),
            r.pareto_optimal.to_string(),
        ];
        row.extend(objective_fields(r));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| CliError::io(path.unwrap_or(Path::new("-")), e))?;
    Ok(())
}

pub fn write_scaling(path: Option<&Path>, rows: &[ScalingRow]) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "family",
        "size",
        "n_qubits",
        "p",
        "instances",
        "approximation_ratio_mean",
        "approximation_ratio_std",
        "success_probability_mean",
        "success_probability_std",
    ])?;
    for r in rows {
        w.write_record([
            r.family.clone(),
            r.size.clone(),
            r.n_qubits.to_string(),
            r.p.to_string(),
            r.instances.to_string(),
            fmt_num(r.approximation_ratio_mean),
            fmt_num(r.approximation_ratio_std),
            fmt_num(r.success_probability_mean),
            fmt_num(r.success_probability_std),
        ])?;
    }
    w.flush().map_err(|e| CliError::io(path.unwrap_or(Path::new("-")), e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formatting_matches_printf_g() {
        // Reference strings from C printf("%.9g").
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (0.1, "0.1"),
            (1.0 / 3.0, "0.333333333"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (6.82e-05, "6.82e-05"),
            (0.0001, "0.0001"),
            (0.00012345678912, "0.000123456789"),
            (99999999.96, "100000000"),
            (-1e-300, "-1e-300"),
            (2.0f64.powi(-20), "9.53674316e-07"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_num(x), want, "{x}");
        }
    }

    proptest! {
        #[test]
        fn nine_digits_round_trip(x in -1e12f64..1e12) {
            let back: f64 = fmt_num(x).parse().unwrap();
            prop_assert!((back - x).abs() <= 1e-8 * x.abs().max(1e-300));
        }
    }
}
