//! Bundled test layouts.

use crate::floorplan::{parse_layout, Layout};

pub const SQUARE: &str = include_str!("../layouts/square.json");
pub const L_SHAPE: &str = include_str!("../layouts/l_shape.json");
pub const COMB: &str = include_str!("../layouts/comb.json");
pub const SQUARE_WITH_HOLE: &str = include_str!("../layouts/square_with_hole.json");
/// Re-drawn 22 m x 22 m office: thin walls as notches in the outer
/// boundary plus a partition and a pillar.
pub const REPLICA: &str = include_str!("../layouts/replica.json");

pub const NAMES: [&str; 5] = ["square", "l_shape", "comb", "square_with_hole", "replica"];

pub fn source(name: &str) -> Option<&'static str> {
    match name {
        "square" => Some(SQUARE),
        "l_shape" => Some(L_SHAPE),
        "comb" => Some(COMB),
        "square_with_hole" => Some(SQUARE_WITH_HOLE),
        "replica" => Some(REPLICA),
        _ => None,
    }
}

pub fn layout(name: &str) -> Option<Layout> {
    source(name).map(|s| parse_layout(s).expect("bundled layout is valid"))
}

pub fn all() -> Vec<Layout> {
    NAMES.iter().filter_map(|n| layout(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_layouts_parse() {
        let all = all();
        assert_eq!(all.len(), NAMES.len());
        for (l, name) in all.iter().zip(NAMES) {
            assert_eq!(l.name, name);
        }
        assert!((layout("comb").unwrap().area() - 56.0).abs() < 1e-9);
        assert!(layout("nope").is_none());
    }
}
