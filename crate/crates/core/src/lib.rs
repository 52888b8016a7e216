pub mod arbitrary;
pub mod bench;
pub mod bounded;
pub mod exec;
pub mod generate;
pub mod grid;
pub mod keys;
pub mod lambda;
pub mod lemmas;
pub mod model;
pub mod oracle;
pub mod quadtree;
pub mod rindex;
pub mod update;
pub mod weighted_nn;
