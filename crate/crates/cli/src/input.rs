//! Parsers for command-line values.
//!
//! * Ψ: semicolon-separated coordinate tuples in the simple-root basis,
//!   e.g. `1,0;2,1`.
//! * Windows: `LO:HI`, inclusive.
//! * Loop elements: either an element JSON document (`{"central": …}`) or
//!   a compact list of `[c*]b:deg` terms separated by `;`, where `b` is
//!   `h<i>`, `x<p>` (1-based) or `K`, e.g. `h1:1;h1:2;x1:0` or `1/3*h2:-1;K`.
//! * `D_ij` combinations: `i,j[,c]` triples separated by `;`, `i` 1-based.

use anyhow::{anyhow, bail, Context, Result};

use liecert::exact::Rat;
use liecert::loopalg::{AffineElement, LoopAlgebra, LoopOperator, Window};

pub fn parse_psi(s: &str, rank: usize) -> Result<Vec<Vec<i64>>> {
    let mut out = Vec::new();
    for tuple in s.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let coords = tuple
            .split(',')
            .map(|c| c.trim().parse::<i64>())
            .collect::<Result<Vec<_>, _>>()
            .with_context(|| format!("bad root tuple {tuple:?}"))?;
        if coords.len() != rank {
            bail!("root {tuple:?} has {} coordinates, expected {rank}", coords.len());
        }
        out.push(coords);
    }
    if out.is_empty() {
        bail!("empty Ψ");
    }
    Ok(out)
}

pub fn parse_window(s: &str) -> Result<Window> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("window must look like LO:HI"))?;
    let (lo, hi): (i64, i64) = (lo.trim().parse()?, hi.trim().parse()?);
    if lo > hi {
        bail!("empty window {lo}:{hi}");
    }
    Ok(Window::new(lo, hi))
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    s.trim().parse::<Rat>().map_err(|e| anyhow!("bad rational {s:?}: {e}"))
}

pub fn parse_rats(s: &str) -> Result<Vec<Rat>> {
    s.split(',').map(parse_rat).collect()
}

fn parse_index(s: &str, limit: usize, what: &str) -> Result<usize> {
    let i: usize = s.parse().with_context(|| format!("bad {what} index {s:?}"))?;
    if i == 0 || i > limit {
        bail!("{what} index {i} out of range 1..={limit}");
    }
    Ok(i - 1)
}

pub fn parse_element(s: &str, alg: &LoopAlgebra) -> Result<AffineElement> {
    let s = s.trim();
    if s.starts_with('{') {
        let x: AffineElement = serde_json::from_str(s).context("bad element JSON")?;
        if let Some(v) = x.support.values().find(|v| v.len() != alg.dim()) {
            bail!("element component has {} coordinates, expected {}", v.len(), alg.dim());
        }
        return Ok(x);
    }
    let mut x = AffineElement::zero();
    for term in s.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let (c, rest) = match term.split_once('*') {
            Some((c, rest)) => (parse_rat(c)?, rest.trim()),
            None => (Rat::one(), term),
        };
        if rest == "K" {
            x.add_scaled(&c, &alg.k());
            continue;
        }
        let (b, deg) = rest
            .split_once(':')
            .ok_or_else(|| anyhow!("term {term:?} needs a degree, e.g. h1:2"))?;
        let deg: i64 = deg.trim().parse().with_context(|| format!("bad degree in {term:?}"))?;
        let basis = if let Some(i) = b.strip_prefix('h') {
            alg.h(parse_index(i, alg.rank(), "torus")?, deg)
        } else if let Some(p) = b.strip_prefix('x') {
            alg.x(parse_index(p, alg.num_roots(), "root")?, deg)
        } else {
            bail!("unknown basis element {b:?}; use h<i>, x<p> or K");
        };
        x.add_scaled(&c, &basis);
    }
    Ok(x)
}

pub fn parse_dij_combination(s: &str, rank: usize) -> Result<LoopOperator> {
    let mut terms = Vec::new();
    for t in s.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let parts: Vec<&str> = t.split(',').map(str::trim).collect();
        if !(2..=3).contains(&parts.len()) {
            bail!("combination term {t:?} must be i,j or i,j,c");
        }
        let i = parse_index(parts[0], rank, "torus")?;
        let j: i64 = parts[1].parse().with_context(|| format!("bad degree in {t:?}"))?;
        let c = parts.get(2).map(|c| parse_rat(c)).transpose()?.unwrap_or_else(Rat::one);
        terms.push((c, LoopOperator::Dij { i, j }));
    }
    Ok(LoopOperator::sum(terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_and_window() {
        assert_eq!(parse_psi("1,0; 2,1", 2).unwrap(), vec![vec![1, 0], vec![2, 1]]);
        assert!(parse_psi("1,0,0", 2).is_err());
        assert!(parse_psi("", 2).is_err());
        assert!(parse_psi("a,b", 2).is_err());
        assert_eq!(parse_window("-4:4").unwrap(), Window::new(-4, 4));
        assert!(parse_window("3:1").is_err());
        assert!(parse_window("3").is_err());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rats("1,-1/2").unwrap(), vec![Rat::one(), liecert::exact::ratio(-1, 2)]);
        assert!(parse_rat("1/0").is_err());
    }
}
