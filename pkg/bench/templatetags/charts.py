from django import template

register = template.Library()


@register.filter
def svg_points(points):
    return " ".join(f"{x:.2f},{y:.2f}" for x, y in points)


@register.filter
def px(value):
    return f"{value:.2f}"
