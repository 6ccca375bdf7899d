/** Pose math: quaternion yaw, ego-frame transforms, pose interpolation. */

import { EgoPoseRow } from './types';

export interface Pose2D {
  t: number; // seconds
  x: number;
  y: number;
  yaw: number;
}

/** Planar heading of a [w, x, y, z] quaternion. */
export function quaternionYaw(q: [number, number, number, number]): number {
  const [w, x, y, z] = q;
  return Math.atan2(2 * (w * z + x * y), 1 - 2 * (y * y + z * z));
}

export function toPose2D(row: EgoPoseRow): Pose2D {
  return {
    t: row.timestamp / 1e6,
    x: row.translation[0],
    y: row.translation[1],
    yaw: quaternionYaw(row.rotation),
  };
}

const wrapAngle = (a: number): number => Math.atan2(Math.sin(a), Math.cos(a));

/** Piecewise-linear pose lookup over a time-sorted pose table. */
export class PoseTrack {
  private readonly poses: Pose2D[];

  constructor(poses: Pose2D[]) {
    this.poses = [...poses].sort((a, b) => a.t - b.t);
  }

  get start(): number {
    const first = this.poses[0];
    if (!first) throw new Error('empty pose track');
    return first.t;
  }

  get end(): number {
    const last = this.poses[this.poses.length - 1];
    if (!last) throw new Error('empty pose track');
    return last.t;
  }

  covers(t: number): boolean {
    return this.poses.length > 0 && t >= this.start && t <= this.end;
  }

  at(t: number): Pose2D {
    if (!this.covers(t)) {
      throw new Error(`time ${t} outside pose track [${this.start}, ${this.end}]`);
    }
    let lo = 0;
    let hi = this.poses.length - 1;
    while (hi - lo > 1) {
      const mid = (lo + hi) >> 1;
      if ((this.poses[mid] as Pose2D).t <= t) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const a = this.poses[lo] as Pose2D;
    const b = this.poses[hi] as Pose2D;
    if (b.t === a.t) return { ...a, t };
    const w = (t - a.t) / (b.t - a.t);
    return {
      t,
      x: a.x + w * (b.x - a.x),
      y: a.y + w * (b.y - a.y),
      yaw: a.yaw + w * wrapAngle(b.yaw - a.yaw),
    };
  }

  /** Speed from a symmetric position difference around t. */
  speedAt(t: number, half = 0.1): number {
    const lo = Math.max(this.start, t - half);
    const hi = Math.min(this.end, t + half);
    if (hi <= lo) return 0;
    const a = this.at(lo);
    const b = this.at(hi);
    return Math.hypot(b.x - a.x, b.y - a.y) / (hi - lo);
  }
}

/** Global point into the frame of the given pose (x forward, y left). */
export function toEgoFrame(pose: Pose2D, x: number, y: number): [number, number] {
  const dx = x - pose.x;
  const dy = y - pose.y;
  const c = Math.cos(-pose.yaw);
  const s = Math.sin(-pose.yaw);
  return [c * dx - s * dy, s * dx + c * dy];
}

export function relativeYaw(pose: Pose2D, yawGlobal: number): number {
  return wrapAngle(yawGlobal - pose.yaw);
}
