//! Batch experiment runner and renderer for Pareto hull peeling:
//! sample → peel/sort → compare → emit CSV tables and SVG figures.

pub mod config;
pub mod render;
pub mod runner;
