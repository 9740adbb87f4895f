//! `start:stop:step` grids.

use crate::{CliError, CliResult};

/// Hard cap on grid sizes.
const MAX_POINTS: usize = 10_000_000;

/// Parses `start:stop:step` into `start + i * step` for every `i` with
/// `start + i * step < stop + step / 2`, or a single number into a one-point
/// grid. Decimal points are always `.`.
pub fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let num = |s: &str| -> CliResult<f64> {
        let v: f64 = s
            .parse()
            .map_err(|_| CliError::Usage(format!("grid `{text}`: `{s}` is not a number")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(CliError::Usage(format!("grid `{text}`: `{s}` is not finite")))
        }
    };
    match parts.as_slice() {
        [single] => Ok(vec![num(single)?]),
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if step <= 0.0 {
                return Err(CliError::Usage(format!("grid `{text}`: step must be positive")));
            }
            if stop < start {
                return Err(CliError::Usage(format!("grid `{text}`: stop is below start")));
            }
            let end = stop + 0.5 * step;
            let count = ((end - start) / step).ceil();
            if count > MAX_POINTS as f64 {
                return Err(CliError::Usage(format!("grid `{text}` has more than {MAX_POINTS} points")));
            }
            Ok((0..count as usize)
                .map(|i| start + i as f64 * step)
                .filter(|&x| x < end)
                .collect())
        }
        _ => Err(CliError::Usage(format!("grid `{text}` must be `start:stop:step` or a single number"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusive_stop() {
        let g = parse_grid("0:4:0.1").unwrap();
        assert_eq!(g.len(), 41);
        assert_eq!(g[0], 0.0);
        assert!((g[40] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn stop_off_the_lattice() {
        assert_eq!(parse_grid("1:2.04:0.5").unwrap(), vec![1.0, 1.5, 2.0]);
        assert_eq!(parse_grid("1:2.3:0.5").unwrap(), vec![1.0, 1.5, 2.0, 2.5]);
    }

    #[test]
    fn single_point() {
        assert_eq!(parse_grid("0.25").unwrap(), vec![0.25]);
        assert_eq!(parse_grid("2:2:1").unwrap(), vec![2.0]);
    }

    #[test]
    fn rejects_bad_grids() {
        for bad in ["", "a:1:1", "0:1", "0:1:0", "0:1:-1", "2:1:0.5", "0:1:1:1", "0:inf:1", "0,5:1:1"] {
            assert!(matches!(parse_grid(bad), Err(CliError::Usage(_))), "{bad}");
        }
    }
}
