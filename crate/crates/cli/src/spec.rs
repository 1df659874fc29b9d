//! Command-line syntax for points, directions, rays, fans and axes.
//!
//! ```text
//! point      v:NAME | e:EDGE@t | c:CELL@x,y
//! direction  h:ANGLE | l:ARC@OFFSET | to:VERTEX
//! ray        POINT;DIRECTION;LENGTH
//! fan        POINT;DIRECTION;DIRECTION
//! axis       POINT;DIRECTION;LENGTH;ORIGIN
//! ```
//!
//! Angles use the shorthand `p/q` (or an integer) for `(p/q)·π` and decimals
//! for radians.

use cat0lab::link::link_at;
use cat0lab::{Angle, Complex, DirectionRef, PointRef, Vec2};

pub fn angle(s: &str) -> Result<Angle, String> {
    Angle::parse_shorthand(s).ok_or_else(|| format!("bad angle `{s}`"))
}

fn number(s: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| format!("bad number `{s}`"))
}

pub fn point(cx: &Complex, s: &str) -> Result<PointRef, String> {
    let (kind, rest) = s.split_once(':').ok_or_else(|| format!("bad point `{s}`"))?;
    match kind {
        "v" => cx
            .vertex_id(rest)
            .map(PointRef::vertex)
            .ok_or_else(|| format!("unknown vertex `{rest}`")),
        "e" => {
            let (name, t) = rest.rsplit_once('@').ok_or_else(|| format!("bad edge point `{s}`"))?;
            let e = cx.edge_id(name).ok_or_else(|| format!("unknown edge `{name}`"))?;
            let t = number(t)?;
            let len = cx.edge(e).length;
            if !(t > 0.0 && t < len) {
                return Err(format!("edge parameter {t} outside (0, {len})"));
            }
            Ok(PointRef::Edge { edge: e, t })
        }
        "c" => {
            let (name, xy) = rest.rsplit_once('@').ok_or_else(|| format!("bad cell point `{s}`"))?;
            let c = cx.cell_id(name).ok_or_else(|| format!("unknown cell `{name}`"))?;
            let (x, y) = xy.split_once(',').ok_or_else(|| format!("bad coordinates `{xy}`"))?;
            let p = Vec2::new(number(x)?, number(y)?);
            let tol = 1e-9 * cx.cell(c).diameter().max(1.0);
            cat0lab::locate_point(cx, c, p, tol).map_err(|e| e.to_string())
        }
        _ => Err(format!("bad point `{s}`")),
    }
}

pub fn direction(cx: &Complex, at: &PointRef, s: &str) -> Result<DirectionRef, String> {
    let (kind, rest) = s.split_once(':').ok_or_else(|| format!("bad direction `{s}`"))?;
    match kind {
        "h" => Ok(DirectionRef::Planar { heading: angle(rest)? }),
        "l" => {
            let (arc, off) = rest
                .split_once('@')
                .ok_or_else(|| format!("bad link direction `{s}`"))?;
            let arc = arc.trim().parse().map_err(|_| format!("bad arc index `{arc}`"))?;
            Ok(DirectionRef::Link {
                arc,
                offset: angle(off)?,
            })
        }
        "to" => {
            let PointRef::Vertex { vertex } = *at else {
                return Err("`to:` directions need a vertex start point".into());
            };
            let w = cx.vertex_id(rest).ok_or_else(|| format!("unknown vertex `{rest}`"))?;
            let link = link_at(cx, at).expect("vertices have links");
            let node = link
                .nodes
                .iter()
                .position(|n| n.toward == w)
                .ok_or_else(|| format!("`{rest}` is not adjacent to `{}`", cx.vertex_name(vertex)))?;
            let pos = link.node_pos(node).ok_or("isolated link node")?;
            Ok(DirectionRef::Link {
                arc: pos.arc,
                offset: pos.offset,
            })
        }
        _ => Err(format!("bad direction `{s}`")),
    }
}

fn parts(s: &str, n: usize, what: &str) -> Result<Vec<String>, String> {
    let v: Vec<String> = s.split(';').map(|x| x.trim().to_string()).collect();
    if v.len() != n {
        return Err(format!("{what} `{s}` needs {n} `;`-separated parts"));
    }
    Ok(v)
}

pub struct Ray {
    pub start: PointRef,
    pub dir: DirectionRef,
    pub length: f64,
}

pub fn ray(cx: &Complex, s: &str) -> Result<Ray, String> {
    let p = parts(s, 3, "ray")?;
    let start = point(cx, &p[0])?;
    let dir = direction(cx, &start, &p[1])?;
    let length = number(&p[2])?;
    if length <= 0.0 {
        return Err(format!("ray length must be positive, got {length}"));
    }
    Ok(Ray { start, dir, length })
}

pub struct Fan {
    pub base: PointRef,
    pub dirs: [DirectionRef; 2],
}

pub fn fan(cx: &Complex, s: &str) -> Result<Fan, String> {
    let p = parts(s, 3, "fan")?;
    let base = point(cx, &p[0])?;
    Ok(Fan {
        base,
        dirs: [direction(cx, &base, &p[1])?, direction(cx, &base, &p[2])?],
    })
}

pub fn axis(cx: &Complex, s: &str) -> Result<(Ray, f64), String> {
    let (r, origin) = s
        .rsplit_once(';')
        .ok_or_else(|| format!("axis `{s}` needs 4 `;`-separated parts"))?;
    Ok((ray(cx, r)?, number(origin)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use cat0lab::build_complex;
    use cat0lab::corpus::ConeWindow;

    #[test]
    fn parses_points_and_directions() {
        let cx = build_complex(&ConeWindow::new(4, 2, 1.0).raw()).unwrap();
        let o = point(&cx, "v:o").unwrap();
        assert_eq!(o, PointRef::vertex(cx.vertex_id("o").unwrap()));
        assert!(matches!(point(&cx, "e:o|r0_1@0.5").unwrap(), PointRef::Edge { .. }));
        // a cell point on a corner snaps to the vertex
        assert_eq!(point(&cx, "c:s0_0_0@0,0").unwrap(), o);
        assert!(point(&cx, "v:nope").is_err());
        assert!(point(&cx, "e:o|r0_1@2").is_err());
        assert!(matches!(
            direction(&cx, &o, "to:r1_1").unwrap(),
            DirectionRef::Link { .. }
        ));
        assert!(direction(&cx, &o, "to:q0_1_1").is_err());
        assert_eq!(
            direction(&cx, &o, "h:1/4").unwrap(),
            DirectionRef::Planar {
                heading: Angle::pi_frac(1, 4)
            }
        );
        assert!(ray(&cx, "v:o;to:r0_1").is_err());
        let (r, origin) = axis(&cx, "v:o;to:r0_1;1.5;0.5").unwrap();
        assert_eq!((r.length, origin), (1.5, 0.5));
    }
}
