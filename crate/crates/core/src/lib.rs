pub mod ahp1;
pub mod assets;
pub mod connections;
pub mod fusion;
pub mod graphs;
pub mod intertwiners;
pub mod linalg;
pub mod scalars;
pub mod verify;
