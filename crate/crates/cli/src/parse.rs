//! Text formats accepted on the command line: complex numbers, function
//! descriptors, point specs and domain files.

use std::path::Path;

use bergman_core::{ClosedForm, DomainSpec, HoloFun};
use num_complex::Complex64;

use crate::CliError;

/// `a,b` or a bare real `a`.
pub fn complex(s: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Parse(format!("bad complex number {s:?} (expected `re,im`)"));
    let mut parts = s.split(',').map(str::trim);
    let re: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let im: f64 = match parts.next() {
        Some(p) => p.parse().map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() || !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

/// Function descriptors:
///
/// - `rational:XI` for `1/(z - ξ)²`
/// - `kernel:W` for `K(·, w)`
/// - `const:C`, `monomial:N[@CENTER]`, `transplanted:N`, `zero`
pub fn function(domain: &DomainSpec, desc: &str) -> Result<HoloFun, CliError> {
    let (head, arg) = desc.split_once(':').unwrap_or((desc, ""));
    let count = |s: &str| s.parse::<u32>().map_err(|_| CliError::Parse(format!("bad exponent {s:?} in {desc:?}")));
    let f = match head {
        "rational" => HoloFun::rational_section(domain, complex(arg)?),
        "kernel" => HoloFun::kernel_section(domain, complex(arg)?),
        "const" => HoloFun::closed_form(domain, ClosedForm::Constant(complex(arg)?)),
        "monomial" => {
            let (n, center) = match arg.split_once('@') {
                Some((n, c)) => (count(n)?, complex(c)?),
                None => (count(arg)?, Complex64::new(0.0, 0.0)),
            };
            HoloFun::closed_form(domain, ClosedForm::Monomial { n, center })
        }
        "transplanted" => HoloFun::closed_form(domain, ClosedForm::TransplantedMonomial { n: count(arg)? }),
        "zero" => Ok(HoloFun::zero(domain)),
        _ => return Err(CliError::Parse(format!("unknown function descriptor {desc:?}"))),
    };
    // A well-formed descriptor that the domain rejects is a check failure,
    // not a parse error.
    f.map_err(CliError::Numeric)
}

/// A catalogue name or a path to a TOML/JSON domain file.
pub fn domain(arg: &str) -> Result<DomainSpec, CliError> {
    if let Some(d) = DomainSpec::named(arg) {
        return Ok(d);
    }
    let path = Path::new(arg);
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("cannot read domain file {arg}: {e}")))?;
    let d: DomainSpec = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("domain file {arg}: {e}")))?
    } else {
        toml::from_str(&text).map_err(|e| CliError::Parse(format!("domain file {arg}: {e}")))?
    };
    d.validate().map_err(|e| CliError::Parse(format!("domain file {arg}: {e}")))?;
    Ok(d)
}

/// `gen:annulus:N`, or a file with one `re,im` (or `re im`) pair per line.
/// Blank lines and lines starting with `#` are skipped.
pub fn points(domain: &DomainSpec, arg: &str) -> Result<Vec<Complex64>, CliError> {
    if arg.starts_with("gen:") {
        return bergman_core::points::from_generator(domain, arg).map_err(|e| CliError::Parse(e.to_string()));
    }
    let text = std::fs::read_to_string(arg).map_err(|e| CliError::Parse(format!("cannot read point file {arg}: {e}")))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let joined = line.split_whitespace().collect::<Vec<_>>().join(",");
        let z = complex(&joined.replace(",,", ",")).map_err(|e| CliError::Parse(format!("{arg}:{}: {e}", lineno + 1)))?;
        out.push(z);
    }
    if out.is_empty() {
        return Err(CliError::Parse(format!("point file {arg} is empty")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(complex("1.5,-2").unwrap(), Complex64::new(1.5, -2.0));
        assert_eq!(complex(" 3 ").unwrap(), Complex64::new(3.0, 0.0));
        assert!(complex("1,2,3").is_err());
        assert!(complex("i").is_err());
        assert!(complex("nan,0").is_err());
    }

    #[test]
    fn function_descriptors() {
        let d = DomainSpec::upper_half_plane();
        let f = function(&d, "rational:0,-1").unwrap();
        let v = f.eval(Complex64::new(0.0, 1.0)).unwrap();
        assert!((v + 0.25).norm() < 1e-15);
        assert!(function(&d, "monomial:2@1,0").is_ok());
        assert!(matches!(function(&d, "bogus:1"), Err(CliError::Parse(_))));
        assert!(matches!(function(&d, "rational:0,1"), Err(CliError::Numeric(_))));
    }
}
