//! The two-link comparison table, the link 2 parameter heatmap, and
//! eco-routing share sweeps on arbitrary networks.

pub mod heatmap;
pub mod sweep;
pub mod table2;
