/**
 * Minimal reader for Level 5 MAT-files (the format the public benchmark
 * scenes ship in).  Supports little-endian files, real numeric arrays of
 * any integer/float storage class, zlib-compressed elements, and the
 * small-data-element encoding.  Complex, sparse, cell, struct and char
 * variables are skipped; version 7.3 (HDF5) files are rejected with a
 * clear error.
 */

import * as zlib from "zlib";

export type MatVariable = {
    name: string;
    /** MATLAB dimensions, e.g. [rows, cols] or [rows, cols, bands]. */
    dims: number[];
    /** Values in MATLAB's column-major order, widened to float64. */
    values: Float64Array;
    storageClass: string;
};

const MI_INT8 = 1;
const MI_UINT8 = 2;
const MI_INT16 = 3;
const MI_UINT16 = 4;
const MI_INT32 = 5;
const MI_UINT32 = 6;
const MI_SINGLE = 7;
const MI_DOUBLE = 9;
const MI_INT64 = 12;
const MI_UINT64 = 13;
const MI_MATRIX = 14;
const MI_COMPRESSED = 15;

const CLASS_NAMES: Record<number, string> = {
    1: "cell", 2: "struct", 3: "object", 4: "char", 5: "sparse",
    6: "double", 7: "single", 8: "int8", 9: "uint8", 10: "int16",
    11: "uint16", 12: "int32", 13: "uint32", 14: "int64", 15: "uint64",
};

const NUMERIC_CLASSES = new Set([6, 7, 8, 9, 10, 11, 12, 13, 14, 15]);

const FLAG_COMPLEX = 0x0800;

type Element = { type: number; data: Buffer };

function align8(n: number): number {
    return (n + 7) & ~7;
}

/** Read one tagged element at `offset`; returns it plus the next offset. */
function readElement(buf: Buffer, offset: number): { element: Element; next: number } {
    if (offset + 8 > buf.length) {
        throw new Error(`truncated element tag at offset ${offset}`);
    }
    const word = buf.readUInt32LE(offset);
    const small = (word >>> 16) !== 0;
    if (small) {
        const type = word & 0xffff;
        const size = word >>> 16;
        if (size > 4) throw new Error(`bad small-element size ${size} at offset ${offset}`);
        const data = buf.subarray(offset + 4, offset + 4 + size);
        return { element: { type, data: Buffer.from(data) }, next: offset + 8 };
    }
    const type = word;
    const size = buf.readUInt32LE(offset + 4);
    const start = offset + 8;
    if (start + size > buf.length) {
        throw new Error(`element of ${size} bytes overruns the file at offset ${offset}`);
    }
    const data = buf.subarray(start, start + size);
    return { element: { type, data: Buffer.from(data) }, next: start + align8(size) };
}

function widenNumeric(type: number, data: Buffer): Float64Array {
    const read = (size: number, get: (off: number) => number): Float64Array => {
        const n = Math.floor(data.length / size);
        const out = new Float64Array(n);
        for (let i = 0; i < n; i++) out[i] = get(i * size);
        return out;
    };
    switch (type) {
        case MI_INT8: return read(1, (o) => data.readInt8(o));
        case MI_UINT8: return read(1, (o) => data.readUInt8(o));
        case MI_INT16: return read(2, (o) => data.readInt16LE(o));
        case MI_UINT16: return read(2, (o) => data.readUInt16LE(o));
        case MI_INT32: return read(4, (o) => data.readInt32LE(o));
        case MI_UINT32: return read(4, (o) => data.readUInt32LE(o));
        case MI_SINGLE: return read(4, (o) => data.readFloatLE(o));
        case MI_DOUBLE: return read(8, (o) => data.readDoubleLE(o));
        case MI_INT64: return read(8, (o) => Number(data.readBigInt64LE(o)));
        case MI_UINT64: return read(8, (o) => Number(data.readBigUInt64LE(o)));
        default:
            throw new Error(`unsupported numeric storage type ${type}`);
    }
}

function parseMatrix(data: Buffer): MatVariable | null {
    let offset = 0;

    const flagsEl = readElement(data, offset);
    offset = flagsEl.next;
    if (flagsEl.element.type !== MI_UINT32 || flagsEl.element.data.length < 8) {
        throw new Error("malformed array-flags subelement");
    }
    const flagsWord = flagsEl.element.data.readUInt32LE(0);
    const klass = flagsWord & 0xff;
    const complex = (flagsWord & FLAG_COMPLEX) !== 0;

    const dimsEl = readElement(data, offset);
    offset = dimsEl.next;
    if (dimsEl.element.type !== MI_INT32) {
        throw new Error("malformed dimensions subelement");
    }
    const dims: number[] = [];
    for (let i = 0; i + 4 <= dimsEl.element.data.length; i += 4) {
        dims.push(dimsEl.element.data.readInt32LE(i));
    }

    const nameEl = readElement(data, offset);
    offset = nameEl.next;
    if (nameEl.element.type !== MI_INT8) {
        throw new Error("malformed array-name subelement");
    }
    const name = nameEl.element.data.toString("latin1").replace(/\0+$/, "");

    if (!NUMERIC_CLASSES.has(klass)) {
        return null; // char / cell / struct / sparse: not a scene variable
    }
    if (complex) {
        throw new Error(`variable '${name}' is complex; only real arrays are supported`);
    }

    const realEl = readElement(data, offset);
    const values = widenNumeric(realEl.element.type, realEl.element.data);
    const count = dims.reduce((a, b) => a * b, 1);
    if (values.length !== count) {
        throw new Error(
            `variable '${name}': payload holds ${values.length} values but dims ` +
            `[${dims.join("x")}] need ${count}`,
        );
    }
    return { name, dims, values, storageClass: CLASS_NAMES[klass] ?? String(klass) };
}

/** Parse every real numeric variable of a MAT 5 file buffer. */
export function readMat(buf: Buffer): Map<string, MatVariable> {
    if (buf.length < 128) {
        throw new Error("file too short to be a MAT 5 file");
    }
    const description = buf.subarray(0, 116).toString("latin1");
    if (description.includes("MATLAB 7.3")) {
        throw new Error("MATLAB 7.3 (HDF5) files are not supported; re-save with '-v7'");
    }
    const endian = buf.subarray(126, 128).toString("latin1");
    if (endian === "MI") {
        throw new Error("big-endian MAT files are not supported");
    }
    if (endian !== "IM") {
        throw new Error(`not a MAT 5 file (endian indicator ${JSON.stringify(endian)})`);
    }

    const variables = new Map<string, MatVariable>();
    let offset = 128;
    while (offset < buf.length) {
        const { element, next } = readElement(buf, offset);
        offset = next;
        let matrix: Buffer | null = null;
        if (element.type === MI_COMPRESSED) {
            const inflated = zlib.inflateSync(element.data);
            const inner = readElement(inflated, 0);
            if (inner.element.type !== MI_MATRIX) continue;
            matrix = inner.element.data;
        } else if (element.type === MI_MATRIX) {
            matrix = element.data;
        } else {
            continue; // unrelated top-level element
        }
        const variable = parseMatrix(matrix);
        if (variable) variables.set(variable.name, variable);
    }
    return variables;
}
