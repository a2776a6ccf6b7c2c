/**
 * HSIC/HSIG v1 container writers (and readers, used by the tests).
 *
 * HSIC v1: one ASCII header line
 * `HSIC1 height=<h> width=<w> n_bands=<n> dtype=f32le order=bsq\n`
 * followed by h*w*n little-endian float32 values in band-sequential order
 * (band-major, row-major within each band).
 *
 * HSIG v1: `HSIG1 height=<h> width=<w> dtype=u16le\n` followed by h*w
 * little-endian uint16 labels, row-major; 0 is the background class.
 */

export type Cube = {
    height: number;
    width: number;
    nBands: number;
    /** Band-sequential values: index ((band * height) + row) * width + col. */
    values: Float32Array;
};

export type LabelMap = {
    height: number;
    width: number;
    /** Row-major labels: index row * width + col. */
    labels: Uint16Array;
};

export function encodeCube(cube: Cube): Buffer {
    const { height, width, nBands, values } = cube;
    if (values.length !== height * width * nBands) {
        throw new Error(
            `cube payload has ${values.length} values, header needs ${height * width * nBands}`,
        );
    }
    const header = Buffer.from(
        `HSIC1 height=${height} width=${width} n_bands=${nBands} dtype=f32le order=bsq\n`,
        "ascii",
    );
    const payload = Buffer.alloc(values.length * 4);
    for (let i = 0; i < values.length; i++) payload.writeFloatLE(values[i], i * 4);
    return Buffer.concat([header, payload]);
}

export function encodeLabels(map: LabelMap): Buffer {
    const { height, width, labels } = map;
    if (labels.length !== height * width) {
        throw new Error(
            `label payload has ${labels.length} values, header needs ${height * width}`,
        );
    }
    const header = Buffer.from(`HSIG1 height=${height} width=${width} dtype=u16le\n`, "ascii");
    const payload = Buffer.alloc(labels.length * 2);
    for (let i = 0; i < labels.length; i++) payload.writeUInt16LE(labels[i], i * 2);
    return Buffer.concat([header, payload]);
}

function splitHeader(buf: Buffer, magic: string): { fields: Map<string, string>; payload: Buffer } {
    const nl = buf.indexOf(0x0a);
    if (nl < 0) throw new Error("missing header line");
    const header = buf.subarray(0, nl).toString("ascii").split(" ");
    if (header[0] !== magic) throw new Error(`bad magic, expected ${magic}`);
    const fields = new Map<string, string>();
    for (const token of header.slice(1)) {
        const eq = token.indexOf("=");
        if (eq < 1) throw new Error(`malformed header field '${token}'`);
        fields.set(token.slice(0, eq), token.slice(eq + 1));
    }
    return { fields, payload: buf.subarray(nl + 1) };
}

function intField(fields: Map<string, string>, key: string): number {
    const raw = fields.get(key);
    const value = Number(raw);
    if (raw === undefined || !Number.isInteger(value) || value < 1) {
        throw new Error(`bad header field '${key}'`);
    }
    return value;
}

export function decodeCube(buf: Buffer): Cube {
    const { fields, payload } = splitHeader(buf, "HSIC1");
    const height = intField(fields, "height");
    const width = intField(fields, "width");
    const nBands = intField(fields, "n_bands");
    if (fields.get("dtype") !== "f32le") throw new Error("unsupported dtype");
    if (fields.get("order") !== "bsq") throw new Error("unsupported order");
    const count = height * width * nBands;
    if (payload.length !== count * 4) {
        throw new Error(`payload size mismatch: need ${count * 4} bytes, got ${payload.length}`);
    }
    const values = new Float32Array(count);
    for (let i = 0; i < count; i++) values[i] = payload.readFloatLE(i * 4);
    return { height, width, nBands, values };
}

export function decodeLabels(buf: Buffer): LabelMap {
    const { fields, payload } = splitHeader(buf, "HSIG1");
    const height = intField(fields, "height");
    const width = intField(fields, "width");
    if (fields.get("dtype") !== "u16le") throw new Error("unsupported dtype");
    const count = height * width;
    if (payload.length !== count * 2) {
        throw new Error(`payload size mismatch: need ${count * 2} bytes, got ${payload.length}`);
    }
    const labels = new Uint16Array(count);
    for (let i = 0; i < count; i++) labels[i] = payload.readUInt16LE(i * 2);
    return { height, width, labels };
}
