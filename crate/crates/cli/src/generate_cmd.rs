//! `nhom-lab generate`: reproducible JSON fixtures.

use nhom_core::generate::{
    random_element, random_involutive_nhom, random_linear_map, random_orthogonal_homs,
    RandomStyle,
};
use nhom_core::json::{ElementJson, MapJson};
use nhom_core::nhom::from_orthogonal_homs;
use nhom_core::{AlgebraDescriptor, Error};

/// Generate an n-potent element fixture.
pub fn generate_npotent(
    n: u32,
    dim: usize,
    selfadjoint: bool,
    seed: u64,
) -> nhom_core::Result<serde_json::Value> {
    let alg = AlgebraDescriptor::full_matrix(dim)?;
    let style = if selfadjoint {
        RandomStyle::SelfAdjointNPotent(n)
    } else {
        RandomStyle::NPotent(n)
    };
    let e = random_element(&alg, style, seed)?;
    Ok(serde_json::to_value(ElementJson::from_element(&e)).expect("serializable"))
}

/// Generate an n-homomorphism fixture between the given algebras.
///
/// Involutive instances are a *-homomorphism (even n) or a difference of
/// two orthogonal *-homomorphisms (odd n); non-involutive instances are
/// assembled from n−1 orthogonal homomorphisms with the root weights.
pub fn generate_nhom(
    n: u32,
    domain_blocks: Vec<usize>,
    codomain_blocks: Vec<usize>,
    involutive: bool,
    seed: u64,
) -> nhom_core::Result<serde_json::Value> {
    let dom = AlgebraDescriptor::direct_sum(domain_blocks)?;
    let cod = AlgebraDescriptor::direct_sum(codomain_blocks)?;
    let map = if involutive {
        random_involutive_nhom(&dom, &cod, n, seed)?.map
    } else {
        let parts = random_orthogonal_homs(&dom, &cod, (n - 1) as usize, seed)?;
        from_orthogonal_homs(&parts, n, 1e-8)?
    };
    Ok(serde_json::to_value(MapJson::from_map(&map)).expect("serializable"))
}

/// Generate a random (generally non-multiplicative) linear map fixture.
pub fn generate_map(
    domain_blocks: Vec<usize>,
    codomain_blocks: Vec<usize>,
    seed: u64,
) -> nhom_core::Result<serde_json::Value> {
    let dom = AlgebraDescriptor::direct_sum(domain_blocks)?;
    let cod = AlgebraDescriptor::direct_sum(codomain_blocks)?;
    let map = random_linear_map(&dom, &cod, seed);
    Ok(serde_json::to_value(MapJson::from_map(&map)).expect("serializable"))
}

/// Write a JSON value to a file, optionally pretty-printed.
pub fn write_json(
    value: &serde_json::Value,
    path: &std::path::Path,
    pretty: bool,
) -> nhom_core::Result<()> {
    let text = render_json(value, pretty);
    std::fs::write(path, text).map_err(|e| Error::ShapeMismatch {
        context: format!("cannot write {}: {e}", path.display()),
    })
}

pub fn render_json(value: &serde_json::Value, pretty: bool) -> String {
    let mut text = if pretty {
        serde_json::to_string_pretty(value).expect("serializable")
    } else {
        serde_json::to_string(value).expect("serializable")
    };
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use nhom_core::npotent::is_npotent;

    #[test]
    fn npotent_fixture_verifies() {
        let v = generate_npotent(3, 4, true, 7).unwrap();
        let e: ElementJson = serde_json::from_value(v).unwrap();
        let e = e.to_element().unwrap();
        assert!(is_npotent(&e, 3, 1e-10).unwrap());
        assert!(e.is_hermitian(1e-12));
    }

    #[test]
    fn fixtures_are_seed_deterministic() {
        let a = generate_nhom(4, vec![2, 2], vec![6], true, 1).unwrap();
        let b = generate_nhom(4, vec![2, 2], vec![6], true, 1).unwrap();
        assert_eq!(a, b);
        let c = generate_nhom(4, vec![2, 2], vec![6], true, 2).unwrap();
        assert_ne!(a, c);
    }
}
