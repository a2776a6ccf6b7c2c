import * as crypto from "crypto";
import * as fs from "fs";
import * as path from "path";

import { encodeCube, encodeLabels } from "./containers";
import { readMat, MatVariable } from "./mat";
import { keptBands, Manifest } from "./manifest";

export type ConversionEcho = {
    scene: string;
    source: string;
    labels_source: string;
    cube_variable: string;
    labels_variable: string;
    bands_removed: [number, number][];
    /** 1-based source band id per output band; strictly increasing. */
    band_index_map: number[];
    height: number;
    width: number;
    source_bands: number;
    output_bands: number;
    outputs: {
        cube: { path: string; sha256_payload: string };
        gt: { path: string; sha256_payload: string };
    };
};

function sha256(buf: Buffer): string {
    return crypto.createHash("sha256").update(buf).digest("hex");
}

function loadVariable(filePath: string, name: string): MatVariable {
    if (!fs.existsSync(filePath)) {
        throw new Error(`source file not found: ${filePath}`);
    }
    const variables = readMat(fs.readFileSync(filePath));
    const variable = variables.get(name);
    if (!variable) {
        const have = [...variables.keys()].join(", ") || "none";
        throw new Error(`variable '${name}' not found in ${filePath} (numeric variables: ${have})`);
    }
    return variable;
}

/**
 * Convert one scene: emits the HSIC cube and HSIG ground truth next to the
 * manifest (paths resolved against `baseDir`) and returns the manifest echo.
 */
export function convert(manifest: Manifest, baseDir: string): ConversionEcho {
    const resolve = (p: string) => path.resolve(baseDir, p);

    const cubeVar = loadVariable(resolve(manifest.source), manifest.cube_variable);
    const labelsSource = manifest.labels_source ?? manifest.source;
    const labelsVar = loadVariable(resolve(labelsSource), manifest.labels_variable);

    if (cubeVar.dims.length !== 3) {
        throw new Error(
            `cube variable '${manifest.cube_variable}' is ${cubeVar.dims.length}-D, expected 3-D`,
        );
    }
    const [height, width, sourceBands] = cubeVar.dims;
    const labelDims = labelsVar.dims;
    if (labelDims.length !== 2 || labelDims[0] !== height || labelDims[1] !== width) {
        throw new Error(
            `label variable '${manifest.labels_variable}' is ${labelDims.join("x")}, ` +
            `cube is ${height}x${width}x${sourceBands}`,
        );
    }

    const kept = keptBands(sourceBands, manifest.bands_removed);
    if (manifest.expected_bands !== undefined && kept.length !== manifest.expected_bands) {
        throw new Error(
            `expected ${manifest.expected_bands} bands after removal, got ${kept.length}`,
        );
    }

    // column-major (i + j*h + k*h*w) -> band-sequential ((k*h + i)*w + j), f32 cast
    const plane = height * width;
    const values = new Float32Array(plane * kept.length);
    for (let out = 0; out < kept.length; out++) {
        const sourceBase = (kept[out] - 1) * plane;
        const outBase = out * plane;
        for (let i = 0; i < height; i++) {
            for (let j = 0; j < width; j++) {
                values[outBase + i * width + j] = Math.fround(
                    cubeVar.values[sourceBase + j * height + i],
                );
            }
        }
    }

    const labels = new Uint16Array(plane);
    for (let i = 0; i < height; i++) {
        for (let j = 0; j < width; j++) {
            const v = labelsVar.values[j * height + i];
            if (!Number.isInteger(v) || v < 0 || v > 0xffff) {
                throw new Error(`label at (${i}, ${j}) is ${v}; labels must be integers in 0..65535`);
            }
            labels[i * width + j] = v;
        }
    }

    const cubeBuf = encodeCube({ height, width, nBands: kept.length, values });
    const gtBuf = encodeLabels({ height, width, labels });
    const cubePath = resolve(manifest.output_cube);
    const gtPath = resolve(manifest.output_gt);
    fs.mkdirSync(path.dirname(cubePath), { recursive: true });
    fs.mkdirSync(path.dirname(gtPath), { recursive: true });
    fs.writeFileSync(cubePath, cubeBuf);
    fs.writeFileSync(gtPath, gtBuf);

    const headerLen = (buf: Buffer) => buf.indexOf(0x0a) + 1;
    const echo: ConversionEcho = {
        scene: manifest.scene,
        source: manifest.source,
        labels_source: labelsSource,
        cube_variable: manifest.cube_variable,
        labels_variable: manifest.labels_variable,
        bands_removed: manifest.bands_removed,
        band_index_map: kept,
        height,
        width,
        source_bands: sourceBands,
        output_bands: kept.length,
        outputs: {
            cube: { path: manifest.output_cube, sha256_payload: sha256(cubeBuf.subarray(headerLen(cubeBuf))) },
            gt: { path: manifest.output_gt, sha256_payload: sha256(gtBuf.subarray(headerLen(gtBuf))) },
        },
    };
    fs.writeFileSync(cubePath + ".manifest.json", JSON.stringify(echo, null, 2) + "\n");
    return echo;
}
