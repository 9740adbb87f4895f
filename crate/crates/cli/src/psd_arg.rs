//! The `--psd` argument.

use std::str::FromStr;

use sampled_rd::Psd;

use crate::{CliError, CliResult};

/// A spectrum named on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum PsdChoice {
    Rect,
    Triangle,
    GaussMarkov,
    File(String),
}

impl FromStr for PsdChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rect" => Ok(PsdChoice::Rect),
            "triangle" => Ok(PsdChoice::Triangle),
            "gauss-markov" => Ok(PsdChoice::GaussMarkov),
            _ => match s.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(PsdChoice::File(path.to_string())),
                _ => Err(format!("unknown PSD `{s}`; expected rect, triangle, gauss-markov or file:PATH")),
            },
        }
    }
}

impl PsdChoice {
    /// Builds the spectrum. `f_b` sets the band edge of the bandlimited
    /// models and `f_0` the corner of the Gauss-Markov model.
    pub fn build(&self, f_b: f64, f_0: f64) -> CliResult<Psd> {
        let psd = match self {
            PsdChoice::Rect => Psd::rect(f_b),
            PsdChoice::Triangle => Psd::triangle(f_b),
            PsdChoice::GaussMarkov => Psd::gauss_markov(f_0),
            PsdChoice::File(path) => Psd::from_csv_path(path),
        };
        psd.map_err(|e| CliError::Usage(format!("--psd: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_names() {
        assert_eq!("rect".parse::<PsdChoice>().unwrap(), PsdChoice::Rect);
        assert_eq!("gauss-markov".parse::<PsdChoice>().unwrap(), PsdChoice::GaussMarkov);
        assert_eq!("file:a.csv".parse::<PsdChoice>().unwrap(), PsdChoice::File("a.csv".into()));
        assert!("file:".parse::<PsdChoice>().is_err());
        assert!("square".parse::<PsdChoice>().is_err());
    }

    #[test]
    fn bad_parameters_are_usage_errors() {
        assert!(matches!(PsdChoice::Rect.build(-1.0, 1.0), Err(CliError::Usage(_))));
        assert!(matches!(
            PsdChoice::File("/nonexistent/psd.csv".into()).build(1.0, 1.0),
            Err(CliError::Usage(_))
        ));
    }
}
