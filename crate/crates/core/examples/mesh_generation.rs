//! Builds the three generated component meshes, writes one to MESH1 text and
//! reads it back, and lists the boundary traces used for interface coupling.

use romdd::experiments::mesh_summary;
use romdd::mesh::{gen_circle_obstacle, gen_quad_grid, gen_tri_grid, parse_mesh, side_trace, write_mesh, Side};

fn main() -> romdd::Result<()> {
    let meshes = [
        ("quad 4x4", gen_quad_grid(4)?),
        ("tri 3x3", gen_tri_grid(3)?),
        ("circle r=0.25", gen_circle_obstacle(0.25, 4, 2)?),
    ];
    for (name, mesh) in &meshes {
        println!("== {name}");
        print!("{}", mesh_summary(mesh));
    }

    let circle = &meshes[2].1;
    let text = write_mesh(circle);
    let back = parse_mesh(&text)?;
    println!("MESH1 round trip: {} bytes, identical = {}", text.len(), &back == circle);

    let left = side_trace(circle, Side::Left)?;
    println!("left-side breakpoints of the circle mesh: {:?}", left.breakpoints());
    Ok(())
}
