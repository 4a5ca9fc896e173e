/** Small deterministic force-directed layout.
 *
 * Spring attraction along edges, pairwise repulsion, and a centering
 * pull, iterated a fixed number of steps from positions seeded by a
 * hash of each node id, so the same graph always lands in the same
 * arrangement.
 */

export interface LayoutNode {
  id: string;
  radius: number;
}

export interface LayoutEdge {
  src: string;
  dst: string;
}

export interface Point {
  x: number;
  y: number;
}

function hash(text: string): number {
  let h = 2166136261;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 16777619);
  }
  return (h >>> 0) / 4294967296;
}

export function layoutGraph(
  nodes: LayoutNode[],
  edges: LayoutEdge[],
  options: { width?: number; height?: number; iterations?: number } = {},
): Map<string, Point> {
  const width = options.width ?? 900;
  const height = options.height ?? 600;
  const iterations = options.iterations ?? 120;
  const positions = new Map<string, Point>();
  for (const node of nodes) {
    positions.set(node.id, {
      x: width * (0.15 + 0.7 * hash(node.id)),
      y: height * (0.15 + 0.7 * hash(node.id + "#y")),
    });
  }
  if (nodes.length < 2) {
    return positions;
  }

  const index = new Map(nodes.map((n, i) => [n.id, i]));
  const xs = nodes.map((n) => positions.get(n.id)!.x);
  const ys = nodes.map((n) => positions.get(n.id)!.y);
  const area = width * height;
  const k = Math.sqrt(area / nodes.length) * 0.7;

  for (let step = 0; step < iterations; step++) {
    const fx = new Array(nodes.length).fill(0);
    const fy = new Array(nodes.length).fill(0);
    const temperature = 0.1 * Math.min(width, height) * (1 - step / iterations) + 1;

    for (let i = 0; i < nodes.length; i++) {
      for (let j = i + 1; j < nodes.length; j++) {
        let dx = xs[i] - xs[j];
        let dy = ys[i] - ys[j];
        let dist = Math.hypot(dx, dy);
        if (dist < 0.01) {
          dx = 0.01 * (i - j);
          dy = 0.01;
          dist = Math.hypot(dx, dy);
        }
        const repulse = (k * k) / dist;
        fx[i] += (dx / dist) * repulse;
        fy[i] += (dy / dist) * repulse;
        fx[j] -= (dx / dist) * repulse;
        fy[j] -= (dy / dist) * repulse;
      }
    }
    for (const edge of edges) {
      const i = index.get(edge.src);
      const j = index.get(edge.dst);
      if (i === undefined || j === undefined) continue;
      const dx = xs[i] - xs[j];
      const dy = ys[i] - ys[j];
      const dist = Math.max(0.01, Math.hypot(dx, dy));
      const attract = (dist * dist) / k;
      fx[i] -= (dx / dist) * attract;
      fy[i] -= (dy / dist) * attract;
      fx[j] += (dx / dist) * attract;
      fy[j] += (dy / dist) * attract;
    }
    for (let i = 0; i < nodes.length; i++) {
      fx[i] += (width / 2 - xs[i]) * 0.02;
      fy[i] += (height / 2 - ys[i]) * 0.02;
      const magnitude = Math.max(0.01, Math.hypot(fx[i], fy[i]));
      const limited = Math.min(magnitude, temperature);
      xs[i] += (fx[i] / magnitude) * limited;
      ys[i] += (fy[i] / magnitude) * limited;
      const margin = 10;
      xs[i] = Math.min(width - margin, Math.max(margin, xs[i]));
      ys[i] = Math.min(height - margin, Math.max(margin, ys[i]));
    }
  }

  nodes.forEach((node, i) => positions.set(node.id, { x: xs[i], y: ys[i] }));
  return positions;
}
