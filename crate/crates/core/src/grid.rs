use crate::error::{Error, Result};

/// `g` equally spaced points on `[0, 1]`, both endpoints included.
pub fn uniform_grid(g: usize) -> Result<Vec<f64>> {
    if g < 2 {
        return Err(Error::domain(format!("grid needs at least 2 points, got {g}")));
    }
    let h = (g - 1) as f64;
    Ok((0..g).map(|i| i as f64 / h).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_are_exact() {
        let g = uniform_grid(100).unwrap();
        assert_eq!(g.len(), 100);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[99], 1.0);
        assert_eq!(g[33], 1.0 / 3.0);
        assert!(uniform_grid(1).is_err());
    }
}
