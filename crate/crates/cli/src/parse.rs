//! Point-list and grid syntax shared by the subcommands.

use bimor::linalg::{c64, C64};
use bimor::transfer::logspace;

use crate::CliError;

/// `logspace:a:b:npts` as a list of reals.
pub fn grid(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        ["logspace", a, b, n] => {
            let a = number(a)?;
            let b = number(b)?;
            let n: usize = n.trim().parse().map_err(|_| CliError::usage(format!("bad point count {n:?}")))?;
            if n == 0 {
                return Err(CliError::usage("grid needs at least one point"));
            }
            Ok(logspace(a, b, n))
        }
        _ => Err(CliError::usage(format!("expected logspace:a:b:npts, got {text:?}"))),
    }
}

fn number(text: &str) -> Result<f64, CliError> {
    let t = text.trim();
    t.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::usage(format!("bad number {t:?}")))
}

/// Complex literal such as `2`, `-3i`, `0.1+2i` or `1e-3-4.5i`.
pub fn complex(text: &str) -> Result<C64, CliError> {
    let t = text.trim();
    let bad = || CliError::usage(format!("bad complex number {t:?}"));
    let Some(body) = t.strip_suffix('i') else {
        return Ok(c64(number(t)?, 0.0));
    };
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(i, ch)| (ch == '+' || ch == '-') && !matches!(body.as_bytes()[i - 1], b'e' | b'E'))
        .map(|(i, _)| i)
        .last();
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => number(other).map_err(|_| bad())?,
    };
    Ok(c64(number(re).map_err(|_| bad())?, im))
}

/// Comma-separated complex literals or a `logspace:` grid. With `imaginary`
/// every real value `w` becomes the pair `iw, -iw`.
pub fn points(text: &str, imaginary: bool) -> Result<Vec<C64>, CliError> {
    let values: Vec<C64> = if text.trim_start().starts_with("logspace") {
        grid(text)?.into_iter().map(|w| c64(w, 0.0)).collect()
    } else {
        text.split(',').filter(|s| !s.trim().is_empty()).map(complex).collect::<Result<_, _>>()?
    };
    if !imaginary {
        return Ok(values);
    }
    values
        .into_iter()
        .map(|z| {
            if z.im != 0.0 {
                Err(CliError::usage(format!("--imaginary expects real values, got {z}")))
            } else {
                Ok([c64(0.0, z.re), c64(0.0, -z.re)])
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .map(|pairs| pairs.into_iter().flatten().collect())
}

pub fn orders(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse().map_err(|_| CliError::usage(format!("bad derivative order {s:?}"))))
        .collect()
}
