// Assembly preview: projects the exported scene-json onto a 2D canvas
// (frame triads per instance, links color-coded) and links the glTF
// artifact for external viewers. No client-side re-assembly: every pose
// comes straight from the export.

import type { SceneDoc } from "./types.js";

export interface Segment {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  color: string;
  width: number;
}

const AXIS_COLORS = ["#d33", "#3a3", "#36c"]; // x, y, z
const LINK_COLORS = ["#e6a23c", "#7d5ba6", "#2f9e9b", "#b0584e", "#5a8f3c", "#666699"];

function project(point: [number, number, number]): [number, number] {
  // simple isometric projection, z up
  const [x, y, z] = point;
  return [x - y * 0.5, -(z + y * 0.25)];
}

function apply(pose: SceneDoc["instances"][0]["pose"], v: [number, number, number]) {
  const r = pose.rotation;
  const t = pose.translation;
  return [
    r[0][0] * v[0] + r[0][1] * v[1] + r[0][2] * v[2] + t[0],
    r[1][0] * v[0] + r[1][1] * v[1] + r[1][2] * v[2] + t[1],
    r[2][0] * v[0] + r[2][1] * v[1] + r[2][2] * v[2] + t[2],
  ] as [number, number, number];
}

export function sceneSegments(scene: SceneDoc, triadSize = 15): Segment[] {
  const linkOf = new Map<string, number>();
  scene.links.forEach((link, index) => {
    for (const id of link) {
      linkOf.set(id, index);
    }
  });
  const origins = new Map<string, [number, number]>();
  const segments: Segment[] = [];
  for (const instance of scene.instances) {
    const origin = apply(instance.pose, [0, 0, 0]);
    origins.set(instance.id, project(origin));
    const axes: [number, number, number][] = [
      [triadSize, 0, 0],
      [0, triadSize, 0],
      [0, 0, triadSize],
    ];
    axes.forEach((axis, i) => {
      const tip = apply(instance.pose, axis);
      const [x1, y1] = project(origin);
      const [x2, y2] = project(tip);
      segments.push({ x1, y1, x2, y2, color: AXIS_COLORS[i], width: 1 });
    });
  }
  for (const joint of scene.joints) {
    const a = origins.get(joint.parent);
    const b = origins.get(joint.child);
    if (!a || !b) {
      continue;
    }
    const link = linkOf.get(joint.child) ?? 0;
    segments.push({
      x1: a[0],
      y1: a[1],
      x2: b[0],
      y2: b[1],
      color: joint.kind === "revolute" ? "#111" : LINK_COLORS[link % LINK_COLORS.length],
      width: joint.kind === "revolute" ? 3 : 2,
    });
  }
  return segments;
}

export function bounds(segments: Segment[]): { minX: number; minY: number; maxX: number; maxY: number } {
  if (segments.length === 0) {
    return { minX: 0, minY: 0, maxX: 1, maxY: 1 };
  }
  const xs = segments.flatMap((s) => [s.x1, s.x2]);
  const ys = segments.flatMap((s) => [s.y1, s.y2]);
  return {
    minX: Math.min(...xs),
    minY: Math.min(...ys),
    maxX: Math.max(...xs),
    maxY: Math.max(...ys),
  };
}

export function drawScene(canvas: HTMLCanvasElement, scene: SceneDoc): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) {
    return;
  }
  const segments = sceneSegments(scene);
  const box = bounds(segments);
  const pad = 20;
  const spanX = Math.max(box.maxX - box.minX, 1);
  const spanY = Math.max(box.maxY - box.minY, 1);
  const scale = Math.min(
    (canvas.width - 2 * pad) / spanX,
    (canvas.height - 2 * pad) / spanY,
  );
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  for (const s of segments) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = s.width;
    ctx.beginPath();
    ctx.moveTo(pad + (s.x1 - box.minX) * scale, pad + (s.y1 - box.minY) * scale);
    ctx.lineTo(pad + (s.x2 - box.minX) * scale, pad + (s.y2 - box.minY) * scale);
    ctx.stroke();
  }
}
