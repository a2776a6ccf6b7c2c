/**
 * Conversion manifests: one JSON file per scene naming the source MAT
 * file(s), the cube/label variables, the 1-based inclusive band ranges to
 * drop, and the output container paths.  The converter echoes the manifest
 * back with the band-index map and payload checksums appended, making the
 * band provenance of every output explicit.
 */

import { z } from "zod";

const bandRange = z.tuple([z.number().int().min(1), z.number().int().min(1)]);

export const manifestSchema = z.object({
    scene: z.string().min(1),
    source: z.string().min(1),
    cube_variable: z.string().min(1),
    /** Defaults to `source`; the common distributions ship labels separately. */
    labels_source: z.string().min(1).optional(),
    labels_variable: z.string().min(1),
    /** 1-based inclusive ranges, e.g. [[107,116],[152,170],[220,224]]. */
    bands_removed: z.array(bandRange).default([]),
    /** Post-removal band count guard; conversion fails when it disagrees. */
    expected_bands: z.number().int().min(2).optional(),
    output_cube: z.string().min(1),
    output_gt: z.string().min(1),
});

export type Manifest = z.infer<typeof manifestSchema>;

export function parseManifest(text: string): Manifest {
    const parsed = manifestSchema.safeParse(JSON.parse(text));
    if (!parsed.success) {
        const issue = parsed.error.issues[0];
        throw new Error(`invalid manifest: ${issue.path.join(".")}: ${issue.message}`);
    }
    return parsed.data;
}

/**
 * Expand removal ranges against a source band count.  Returns the kept
 * source band ids (1-based, ascending) — the output→source band map.
 */
export function keptBands(nBands: number, removed: [number, number][]): number[] {
    const sorted = [...removed].sort((a, b) => a[0] - b[0]);
    let previousEnd = 0;
    for (const [lo, hi] of sorted) {
        if (lo > hi) throw new Error(`empty removal range ${lo}-${hi}`);
        if (hi > nBands) throw new Error(`removal range ${lo}-${hi} exceeds ${nBands} bands`);
        if (lo <= previousEnd) throw new Error(`removal ranges overlap at band ${lo}`);
        previousEnd = hi;
    }
    const dropped = new Set<number>();
    for (const [lo, hi] of sorted) {
        for (let b = lo; b <= hi; b++) dropped.add(b);
    }
    const kept: number[] = [];
    for (let b = 1; b <= nBands; b++) {
        if (!dropped.has(b)) kept.push(b);
    }
    if (kept.length < 2) throw new Error("fewer than 2 bands remain after removal");
    return kept;
}
