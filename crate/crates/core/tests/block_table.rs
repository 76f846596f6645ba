mod common;

use anosov_core::sphere_products::{block_table, theorem17_check, GeneratorBlocks, SphereProductSpec};
use anosov_core::IntMatrix;

#[test]
fn example_table_matches_published_blocks() {
    common::check_block_table().unwrap();
}

#[test]
fn example_cohomology_has_total_rank_64() {
    let spec = common::example_spec();
    assert_eq!(spec.e(), 2);
    let table = block_table(&spec, None).unwrap();
    let blocks: usize = table.degrees.iter().map(|d| d.symbols().len()).sum();
    let published: usize = common::published_block_table().iter().map(Vec::len).sum();
    assert_eq!(blocks, published);
    assert_eq!(spec.ring().betti_numbers().iter().sum::<usize>(), 1 << 6);
}

#[test]
fn rendered_table_lists_every_degree() {
    let text = block_table(&common::example_spec(), None).unwrap().render();
    assert_eq!(text.lines().count(), 13);
    assert!(text.starts_with("f^{*0} = Id_Z\n"));
    assert!(text.ends_with("f^{*12} = A1^∧2 ⊗ A3^∧2\n"));
}

#[test]
fn odd_cancellation_on_s3_s3_s5() {
    let spec = SphereProductSpec::from_pairs(&[(3, 2), (5, 1)]).unwrap();
    let mut blocks = GeneratorBlocks::new();
    blocks.insert(3, IntMatrix::from_rows(&[[2, 1], [1, 1]]));
    blocks.insert(5, IntMatrix::from_rows(&[[1]]));
    let r = theorem17_check(&spec, &blocks, 5, 12).unwrap();
    assert!(r.identically_zero);
    assert_eq!(r.paired_sequence, r.generic_sequence);
}
