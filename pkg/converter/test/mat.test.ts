import { describe, expect, it } from "vitest";

import { readMat } from "../src/mat";
import { writeMat5 } from "./matwriter";

describe("readMat", () => {
    it("round-trips a double matrix", () => {
        const values = [1.5, -2.25, 3.75, 4.125, 0.0, 9.5]; // column-major 3x2
        const buf = writeMat5([{ name: "cube", dims: [3, 2], values }]);
        const vars = readMat(buf);
        const v = vars.get("cube");
        expect(v).toBeDefined();
        expect(v!.dims).toEqual([3, 2]);
        expect(Array.from(v!.values)).toEqual(values);
        expect(v!.storageClass).toBe("double");
    });

    it("parses zlib-compressed elements", () => {
        const values = Array.from({ length: 12 }, (_, i) => i * 0.5);
        const buf = writeMat5([{ name: "z", dims: [3, 4], values }], { compress: true });
        const v = readMat(buf).get("z");
        expect(v).toBeDefined();
        expect(Array.from(v!.values)).toEqual(values);
    });

    it("widens integer storage classes to float64", () => {
        const buf = writeMat5([
            { name: "gt", dims: [2, 2], values: [0, 3, 1, 65535], storage: "uint16" },
            { name: "b", dims: [2, 2], values: [0, 200, 17, 255], storage: "uint8" },
        ]);
        const vars = readMat(buf);
        expect(Array.from(vars.get("gt")!.values)).toEqual([0, 3, 1, 65535]);
        expect(Array.from(vars.get("b")!.values)).toEqual([0, 200, 17, 255]);
        expect(vars.get("gt")!.storageClass).toBe("uint16");
    });

    it("reads small-data-element variable names", () => {
        const buf = writeMat5([{ name: "ab", dims: [1, 2], values: [7, 8] }], { smallName: true });
        expect(Array.from(readMat(buf).get("ab")!.values)).toEqual([7, 8]);
    });

    it("parses several variables in one file", () => {
        const buf = writeMat5([
            { name: "cube", dims: [2, 2, 2], values: [1, 2, 3, 4, 5, 6, 7, 8] },
            { name: "gt", dims: [2, 2], values: [1, 0, 2, 1], storage: "uint8" },
        ]);
        const vars = readMat(buf);
        expect([...vars.keys()].sort()).toEqual(["cube", "gt"]);
        expect(vars.get("cube")!.dims).toEqual([2, 2, 2]);
    });

    it("rejects big-endian files", () => {
        const buf = writeMat5([{ name: "x", dims: [1, 1], values: [1] }]);
        buf.write("MI", 126, "latin1");
        expect(() => readMat(buf)).toThrow(/big-endian/);
    });

    it("rejects MATLAB 7.3 files", () => {
        const buf = writeMat5([{ name: "x", dims: [1, 1], values: [1] }], {
            description: "MATLAB 7.3 MAT-file",
        });
        expect(() => readMat(buf)).toThrow(/7\.3/);
    });

    it("rejects truncated files", () => {
        expect(() => readMat(Buffer.alloc(64))).toThrow(/too short/);
    });

    it("rejects dims/payload disagreement", () => {
        const buf = writeMat5([{ name: "x", dims: [2, 2], values: [1, 2, 3, 4] }]);
        // dims subelement sits right after the 16-byte array-flags inside the
        // matrix element (8 header + 8 tag each); corrupt the row count
        const matrixDataStart = 128 + 8;
        buf.writeInt32LE(5, matrixDataStart + 16 + 8);
        expect(() => readMat(buf)).toThrow(/payload holds/);
    });
});
