//! Budget grids: `a:b:s` ranges (both endpoints included) or comma lists.

use crate::CliError;

/// Relative slack when deciding whether `b` itself is on the grid.
const ENDPOINT_SLACK: f64 = 1e-9;

/// Rounds to 12 significant digits so `0:1:0.1` yields `0.3`, not
/// `0.30000000000000004`.
fn tidy(v: f64) -> f64 {
    format!("{v:.11e}").parse().unwrap_or(v)
}

fn parse_num(s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| CliError::Usage(format!("not a number: {s:?}")))
}

pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let values = match parts.as_slice() {
        [a, b, s] => {
            let (a, b, s) = (parse_num(a)?, parse_num(b)?, parse_num(s)?);
            if !(s.is_finite() && s > 0.0 && a.is_finite() && b.is_finite()) {
                return Err(CliError::Usage(format!(
                    "bad range {spec:?}: step must be positive"
                )));
            }
            if b < a {
                return Err(CliError::Usage(format!(
                    "bad range {spec:?}: end before start"
                )));
            }
            let steps = ((b - a) / s * (1.0 + ENDPOINT_SLACK) + ENDPOINT_SLACK).floor() as usize;
            (0..=steps).map(|i| tidy(a + i as f64 * s)).collect()
        }
        [list] => list
            .split(',')
            .map(parse_num)
            .collect::<Result<Vec<_>, _>>()?,
        _ => {
            return Err(CliError::Usage(format!(
                "expected a:b:step or a comma list, got {spec:?}"
            )))
        }
    };
    validate_grid(&values)?;
    Ok(values)
}

pub fn validate_grid(values: &[f64]) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(CliError::Usage("empty grid".into()));
    }
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(CliError::Usage(format!(
            "grid values must be finite and >= 0, got {v}"
        )));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Usage("grid must be strictly increasing".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_includes_both_ends() {
        assert_eq!(
            parse_grid("0:1:0.25").unwrap(),
            vec![0.0, 0.25, 0.5, 0.75, 1.0]
        );
        let g = parse_grid("0:1:0.1").unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g[3], 0.3);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert_eq!(parse_grid("0:5:0.2").unwrap().len(), 26);
        assert_eq!(parse_grid("2:2:1").unwrap(), vec![2.0]);
        // end not on the grid
        assert_eq!(parse_grid("0:1:0.4").unwrap(), vec![0.0, 0.4, 0.8]);
    }

    #[test]
    fn lists() {
        assert_eq!(parse_grid("0,0.5, 1.5").unwrap(), vec![0.0, 0.5, 1.5]);
        assert_eq!(parse_grid("3").unwrap(), vec![3.0]);
    }

    #[test]
    fn rejects_bad_grids() {
        for bad in [
            "", "1,0", "0,0", "-1:1:0.5", "0:1:0", "0:1:-1", "1:0:0.1", "a", "0:1", "0:1:2:3",
            "nan",
        ] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }
}
